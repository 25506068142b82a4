//! Statement documents and the corpus they form.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::extract::{JavaScanner, LineExtractor, RawStatement, StatementExtractor};
use super::tokenize::Tokenizer;
use super::BluesError;
use crate::ranked::StatementId;

/// Version tag written into corpus cache files.
pub const CORPUS_CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DocField {
    #[serde(rename = "stmt_tokens")]
    Statement,
    #[serde(rename = "method_tokens")]
    Method,
    #[serde(rename = "class_tokens")]
    Class,
    #[serde(rename = "comment_tokens")]
    Comment,
}

impl DocField {
    pub const ALL: [DocField; 4] = [
        DocField::Statement,
        DocField::Method,
        DocField::Class,
        DocField::Comment,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DocField::Statement => "stmt_tokens",
            DocField::Method => "method_tokens",
            DocField::Class => "class_tokens",
            DocField::Comment => "comment_tokens",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        DocField::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Token multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermBag(BTreeMap<String, u32>);

impl TermBag {
    pub fn add(&mut self, term: impl Into<String>) {
        *self.0.entry(term.into()).or_insert(0) += 1;
    }

    pub fn count(&self, term: &str) -> u32 {
        self.0.get(term).copied().unwrap_or(0)
    }

    /// Total number of tokens, counting repeats.
    pub fn len(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.0.iter().map(|(t, c)| (t.as_str(), *c))
    }

    fn merge(&mut self, other: &TermBag) {
        for (t, c) in &other.0 {
            *self.0.entry(t.clone()).or_insert(0) += c;
        }
    }
}

impl<S: Into<String>> FromIterator<S> for TermBag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bag = TermBag::default();
        for t in iter {
            bag.add(t);
        }
        bag
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementDocument {
    pub statement: StatementId,
    pub fields: BTreeMap<DocField, TermBag>,
}

impl StatementDocument {
    pub fn field(&self, field: DocField) -> Option<&TermBag> {
        self.fields.get(&field)
    }
}

/// Collection statistics for one document field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldStats {
    pub num_docs: usize,
    pub doc_freq: HashMap<String, u32>,
    pub total_len: u64,
}

impl FieldStats {
    pub fn df(&self, term: &str) -> u32 {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    pub fn avg_len(&self) -> f64 {
        if self.num_docs == 0 {
            0.0
        } else {
            self.total_len as f64 / self.num_docs as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatementCorpus {
    documents: Vec<StatementDocument>,
    stats: [FieldStats; 4],
}

#[derive(Serialize, Deserialize)]
struct CorpusCache {
    version: u32,
    documents: Vec<StatementDocument>,
}

impl StatementCorpus {
    /// Builds a corpus from documents. Documents without statement tokens are
    /// dropped; documents sharing a statement id are merged.
    pub fn from_documents(docs: impl IntoIterator<Item = StatementDocument>) -> Self {
        let mut documents: Vec<StatementDocument> = Vec::new();
        let mut index: HashMap<StatementId, usize> = HashMap::new();
        for doc in docs {
            if doc.field(DocField::Statement).is_none_or(TermBag::is_empty) {
                continue;
            }
            match index.get(&doc.statement) {
                Some(&i) => {
                    for (field, bag) in &doc.fields {
                        let existing = documents[i].fields.entry(*field).or_default();
                        // context fields repeat verbatim for statements on one line
                        if *field == DocField::Statement || *field == DocField::Comment {
                            existing.merge(bag);
                        } else if existing.is_empty() {
                            *existing = bag.clone();
                        }
                    }
                }
                None => {
                    index.insert(doc.statement.clone(), documents.len());
                    documents.push(doc);
                }
            }
        }

        let mut stats: [FieldStats; 4] = Default::default();
        for field in DocField::ALL {
            let s = &mut stats[field.index()];
            s.num_docs = documents.len();
            for doc in &documents {
                if let Some(bag) = doc.field(field) {
                    s.total_len += bag.len();
                    for (term, _) in bag.terms() {
                        *s.doc_freq.entry(term.to_string()).or_insert(0) += 1;
                    }
                }
            }
        }
        StatementCorpus { documents, stats }
    }

    pub fn documents(&self) -> &[StatementDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn stats(&self, field: DocField) -> &FieldStats {
        &self.stats[field.index()]
    }

    pub fn write_cache<W: Write>(&self, out: W) -> Result<(), BluesError> {
        let cache = CorpusCache {
            version: CORPUS_CACHE_VERSION,
            documents: self.documents.clone(),
        };
        serde_json::to_writer(out, &cache).map_err(BluesError::Cache)
    }

    pub fn read_cache<R: Read>(input: R) -> Result<Self, BluesError> {
        let cache: CorpusCache = serde_json::from_reader(input).map_err(BluesError::Cache)?;
        if cache.version != CORPUS_CACHE_VERSION {
            return Err(BluesError::CacheVersion(cache.version));
        }
        Ok(StatementCorpus::from_documents(cache.documents))
    }
}

/// Problems that did not stop corpus construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusWarning {
    Unreadable { path: PathBuf, message: String },
    LineFallback { path: PathBuf, message: String },
}

impl std::fmt::Display for CorpusWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorpusWarning::Unreadable { path, message } => {
                write!(f, "{}: skipped unreadable file: {message}", path.display())
            }
            CorpusWarning::LineFallback { path, message } => write!(
                f,
                "{}: {message}; using one statement per line",
                path.display()
            ),
        }
    }
}

pub struct CorpusOptions {
    /// File extensions (without dot) to read.
    pub extensions: Vec<String>,
    pub extractor: Box<dyn StatementExtractor>,
    pub tokenizer: Tokenizer,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            extensions: vec!["java".to_string()],
            extractor: Box::new(JavaScanner),
            tokenizer: Tokenizer::default(),
        }
    }
}

impl std::fmt::Debug for CorpusOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorpusOptions")
            .field("extensions", &self.extensions)
            .finish_non_exhaustive()
    }
}

/// Turns an extracted statement into a document.
pub fn statement_document(stmt: &RawStatement, tokenizer: &Tokenizer) -> StatementDocument {
    let mut fields = BTreeMap::new();
    fields.insert(
        DocField::Statement,
        tokenizer.tokenize(&stmt.text).into_iter().collect(),
    );
    fields.insert(
        DocField::Method,
        tokenizer.tokenize(&stmt.method_name).into_iter().collect(),
    );
    fields.insert(
        DocField::Class,
        stmt.class_simple_names
            .iter()
            .flat_map(|c| tokenizer.tokenize(c))
            .collect(),
    );
    fields.insert(
        DocField::Comment,
        stmt.comments
            .iter()
            .flat_map(|c| tokenizer.tokenize(c))
            .collect(),
    );
    StatementDocument {
        statement: StatementId::new(stmt.statement_id()),
        fields,
    }
}

/// Reads every source file under `root` (sorted by path), extracts statements
/// and builds the corpus. Files are processed in parallel on the current
/// rayon pool; the result does not depend on the pool size.
pub fn build_corpus(
    root: &Path,
    options: &CorpusOptions,
) -> Result<(StatementCorpus, Vec<CorpusWarning>), BluesError> {
    if !root.is_dir() {
        return Err(BluesError::NotADirectory(root.to_path_buf()));
    }
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        match entry {
            Ok(e) if e.file_type().is_file() => {
                let wanted = e
                    .path()
                    .extension()
                    .and_then(|x| x.to_str())
                    .is_some_and(|x| options.extensions.iter().any(|w| w == x));
                if wanted {
                    files.push(e.into_path());
                }
            }
            Ok(_) => {}
            Err(err) => warnings.push(CorpusWarning::Unreadable {
                path: err
                    .path()
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| root.to_path_buf()),
                message: err.to_string(),
            }),
        }
    }

    let per_file: Vec<(Vec<StatementDocument>, Option<CorpusWarning>)> = files
        .par_iter()
        .map(|path| documents_for_file(path, options))
        .collect();

    let mut docs = Vec::new();
    for (file_docs, warning) in per_file {
        docs.extend(file_docs);
        warnings.extend(warning);
    }
    Ok((StatementCorpus::from_documents(docs), warnings))
}

fn documents_for_file(
    path: &Path,
    options: &CorpusOptions,
) -> (Vec<StatementDocument>, Option<CorpusWarning>) {
    let source = match fs::read(path).map(String::from_utf8) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            return (
                Vec::new(),
                Some(CorpusWarning::Unreadable {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                }),
            )
        }
        Err(e) => {
            return (
                Vec::new(),
                Some(CorpusWarning::Unreadable {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                }),
            )
        }
    };
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let (stmts, warning) = match options.extractor.extract(&source, stem) {
        Ok(s) => (s, None),
        Err(e) => (
            LineExtractor
                .extract(&source, stem)
                .expect("line extraction is infallible"),
            Some(CorpusWarning::LineFallback {
                path: path.to_path_buf(),
                message: e.to_string(),
            }),
        ),
    };
    let docs = stmts
        .iter()
        .map(|s| statement_document(s, &options.tokenizer))
        .collect();
    (docs, warning)
}
