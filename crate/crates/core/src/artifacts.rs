//! On-disk build products.
//!
//! A build directory holds:
//!
//! | file            | content                                                   |
//! |-----------------|-----------------------------------------------------------|
//! | `corpus.jsonl`  | one JSON object per cleaned posting, in id order          |
//! | `vocab.tsv`     | `term \t term_id \t df`, one line per term, in id order   |
//! | `sparse.bin`    | `MJSX`, version, N, nnz, offsets (u64), term ids (u32), weights (f64) |
//! | `dense.bin`     | `MJDX`, version, name length + name, N, D, N*D f32 row-major |
//! | `manifest.json` | [`ArtifactManifest`]                                      |
//!
//! All integers are little-endian u64 unless noted. Checksums are XXH64
//! with seed 0 over the whole file, written as 16 lowercase hex digits.

use std::collections::BTreeMap;
use std::fs;
use std::hash::Hasher;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twox_hash::XxHash64;

use crate::corpus::Corpus;
use crate::embedding::{
    DenseIndex, Embedder, HashEmbedder, HttpEmbeddingProvider, ProviderEmbedder,
};
use crate::engine::Engine;
use crate::ingest::{IngestReport, JobPosting};
use crate::lexical::{SparseIndex, Vocabulary};
use crate::ranker::RankerConfig;

pub const FORMAT_VERSION: u32 = 1;
pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const VOCAB_FILE: &str = "vocab.tsv";
pub const SPARSE_FILE: &str = "sparse.bin";
pub const DENSE_FILE: &str = "dense.bin";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const INGEST_REPORT_FILE: &str = "ingest_report.json";

const SPARSE_MAGIC: &[u8; 4] = b"MJSX";
const DENSE_MAGIC: &[u8; 4] = b"MJDX";

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("artifact i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("unsupported artifact format version {found} (supported: {supported})")]
    VersionMismatch { found: u64, supported: u32 },
    #[error("checksum mismatch for {file}: manifest {expected}, file {actual}")]
    ChecksumMismatch {
        file: String,
        expected: String,
        actual: String,
    },
    #[error("missing artifact component {0}")]
    MissingComponent(String),
    #[error("corrupt artifact {file}: {reason}")]
    Corrupt { file: String, reason: String },
    #[error("inconsistent artifacts: {0}")]
    Inconsistent(String),
    #[error("cannot construct embedder: {0}")]
    Embedder(String),
}

impl ArtifactError {
    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn corrupt(file: &str, reason: impl Into<String>) -> Self {
        Self::Corrupt {
            file: file.to_string(),
            reason: reason.into(),
        }
    }
}

/// How to rebuild the query-time embedder that produced `dense.bin`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbedderSpec {
    Hash {
        dimension: usize,
        #[serde(default)]
        synonyms: BTreeMap<String, String>,
    },
    Provider {
        url: String,
        model: String,
        dimension: usize,
    },
}

impl EmbedderSpec {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Hash { dimension, .. } | Self::Provider { dimension, .. } => *dimension,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Embedder>, ArtifactError> {
        match self {
            Self::Hash {
                dimension,
                synonyms,
            } => {
                if *dimension < 8 {
                    return Err(ArtifactError::Embedder(format!(
                        "hash embedder needs at least 8 dimensions, got {dimension}"
                    )));
                }
                Ok(Box::new(HashEmbedder::with_synonyms(
                    *dimension,
                    synonyms.clone(),
                )))
            }
            Self::Provider {
                url,
                model,
                dimension,
            } => {
                let provider = HttpEmbeddingProvider::new(url.clone())
                    .map_err(|e| ArtifactError::Embedder(e.to_string()))?;
                Ok(Box::new(ProviderEmbedder::new(
                    Box::new(provider),
                    model,
                    *dimension,
                )))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub file: String,
    pub checksum: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactManifest {
    pub format_version: u32,
    pub created_at: String,
    pub corpus_checksum: String,
    pub record_count: usize,
    pub embedder_name: String,
    pub embedding_dimension: usize,
    pub embedder: EmbedderSpec,
    pub ranker: RankerConfig,
    pub components: Vec<ComponentEntry>,
}

impl ArtifactManifest {
    pub fn component(&self, file: &str) -> Option<&ComponentEntry> {
        self.components.iter().find(|c| c.file == file)
    }
}

/// Everything [`load_artifacts`] validated and reassembled.
pub struct LoadedArtifacts {
    pub corpus: Corpus,
    pub sparse: SparseIndex,
    pub dense: DenseIndex,
    pub manifest: ArtifactManifest,
}

impl LoadedArtifacts {
    /// Pairs the indexes with the embedder described in the manifest.
    pub fn into_engine(self) -> Result<(Engine, ArtifactManifest), crate::Error> {
        let embedder = self.manifest.embedder.build()?;
        let engine = Engine::from_parts(self.corpus, self.sparse, self.dense, embedder)?;
        Ok((engine, self.manifest))
    }
}

pub fn checksum_bytes(bytes: &[u8]) -> String {
    let mut h = XxHash64::with_seed(0);
    h.write(bytes);
    format!("{:016x}", h.finish())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ArtifactError> {
    fs::write(path, bytes).map_err(|e| ArtifactError::io(path, e))
}

fn read_component(dir: &Path, file: &str) -> Result<Vec<u8>, ArtifactError> {
    let path = dir.join(file);
    match fs::read(&path) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            Err(ArtifactError::MissingComponent(file.to_string()))
        }
        Err(e) => Err(ArtifactError::io(&path, e)),
    }
}

pub fn encode_corpus(postings: &[JobPosting]) -> Vec<u8> {
    let mut out = Vec::new();
    for p in postings {
        serde_json::to_writer(&mut out, p).expect("posting serializes");
        out.push(b'\n');
    }
    out
}

fn decode_corpus(bytes: &[u8]) -> Result<Vec<JobPosting>, ArtifactError> {
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            serde_json::from_slice(line)
                .map_err(|e| ArtifactError::corrupt(CORPUS_FILE, format!("line {}: {e}", i + 1)))
        })
        .collect()
}

fn encode_vocab(vocab: &Vocabulary) -> Vec<u8> {
    let mut out = Vec::new();
    for (term, id, df) in vocab.iter() {
        writeln!(out, "{term}\t{id}\t{df}").expect("write to vec");
    }
    out
}

fn decode_vocab(bytes: &[u8]) -> Result<Vocabulary, ArtifactError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| ArtifactError::corrupt(VOCAB_FILE, e.to_string()))?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let bad = |why: &str| ArtifactError::corrupt(VOCAB_FILE, format!("line {}: {why}", i + 1));
        let mut fields = line.split('\t');
        let (Some(term), Some(id), Some(df), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(bad("expected three tab-separated fields"));
        };
        let id: usize = id.parse().map_err(|_| bad("bad term id"))?;
        let df: u32 = df.parse().map_err(|_| bad("bad df"))?;
        if id != i {
            return Err(bad("term ids must be dense and in order"));
        }
        entries.push((term.to_string(), df));
    }
    Ok(Vocabulary::from_entries(entries))
}

fn encode_sparse(index: &SparseIndex) -> Vec<u8> {
    let mut out = Vec::with_capacity(28 + index.row_offsets().len() * 8 + index.nnz() * 12);
    out.extend_from_slice(SPARSE_MAGIC);
    out.extend_from_slice(&u64::from(FORMAT_VERSION).to_le_bytes());
    out.extend_from_slice(&(index.num_documents() as u64).to_le_bytes());
    out.extend_from_slice(&(index.nnz() as u64).to_le_bytes());
    for &o in index.row_offsets() {
        out.extend_from_slice(&o.to_le_bytes());
    }
    for &t in index.term_ids() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    for &w in index.weights() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

/// Sequential little-endian reader over a component file.
struct Cursor<'a> {
    file: &'static str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(file: &'static str, bytes: &'a [u8]) -> Self {
        Self {
            file,
            bytes,
            pos: 0,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ArtifactError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| ArtifactError::corrupt(self.file, "truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, ArtifactError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, ArtifactError> {
        usize::try_from(self.u64()?)
            .map_err(|_| ArtifactError::corrupt(self.file, "length overflow"))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<(), ArtifactError> {
        if self.take(4)? != magic {
            return Err(ArtifactError::corrupt(self.file, "bad magic bytes"));
        }
        let version = self.u64()?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(ArtifactError::VersionMismatch {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        Ok(())
    }

    fn array<T, const W: usize>(
        &mut self,
        n: usize,
        f: fn([u8; W]) -> T,
    ) -> Result<Vec<T>, ArtifactError> {
        let bytes = self.take(
            n.checked_mul(W)
                .ok_or_else(|| ArtifactError::corrupt(self.file, "length overflow"))?,
        )?;
        Ok(bytes
            .chunks_exact(W)
            .map(|c| f(c.try_into().unwrap()))
            .collect())
    }

    fn finish(&self) -> Result<(), ArtifactError> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(ArtifactError::corrupt(self.file, "trailing bytes"))
        }
    }
}

fn decode_sparse(bytes: &[u8], vocabulary: Vocabulary) -> Result<SparseIndex, ArtifactError> {
    let mut c = Cursor::new(SPARSE_FILE, bytes);
    c.header(SPARSE_MAGIC)?;
    let n = c.len()?;
    let nnz = c.len()?;
    let offsets = c.array(n + 1, u64::from_le_bytes)?;
    let term_ids = c.array(nnz, u32::from_le_bytes)?;
    let weights = c.array(nnz, f64::from_le_bytes)?;
    c.finish()?;
    SparseIndex::from_parts(vocabulary, offsets, term_ids, weights)
        .map_err(|e| ArtifactError::corrupt(SPARSE_FILE, e))
}

fn encode_dense(index: &DenseIndex) -> Vec<u8> {
    let name = index.embedder_name().as_bytes();
    let mut out = Vec::with_capacity(44 + name.len() + index.as_slice().len() * 4);
    out.extend_from_slice(DENSE_MAGIC);
    out.extend_from_slice(&u64::from(FORMAT_VERSION).to_le_bytes());
    out.extend_from_slice(&(name.len() as u64).to_le_bytes());
    out.extend_from_slice(name);
    out.extend_from_slice(&(index.len() as u64).to_le_bytes());
    out.extend_from_slice(&(index.dimension() as u64).to_le_bytes());
    for &x in index.as_slice() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

fn decode_dense(bytes: &[u8]) -> Result<DenseIndex, ArtifactError> {
    let mut c = Cursor::new(DENSE_FILE, bytes);
    c.header(DENSE_MAGIC)?;
    let name_len = c.len()?;
    let name = std::str::from_utf8(c.take(name_len)?)
        .map_err(|_| ArtifactError::corrupt(DENSE_FILE, "embedder name is not UTF-8"))?
        .to_string();
    let n = c.len()?;
    let d = c.len()?;
    let count = n
        .checked_mul(d)
        .ok_or_else(|| ArtifactError::corrupt(DENSE_FILE, "length overflow"))?;
    let vectors = c.array(count, f32::from_le_bytes)?;
    c.finish()?;
    DenseIndex::from_parts(name, d, vectors).map_err(|e| ArtifactError::corrupt(DENSE_FILE, e))
}

/// Writes the cleaned corpus and its ingest report.
pub fn save_corpus(
    dir: &Path,
    postings: &[JobPosting],
    report: &IngestReport,
) -> Result<(), ArtifactError> {
    fs::create_dir_all(dir).map_err(|e| ArtifactError::io(dir, e))?;
    write_file(&dir.join(CORPUS_FILE), &encode_corpus(postings))?;
    let report = serde_json::to_vec_pretty(report).expect("report serializes");
    write_file(&dir.join(INGEST_REPORT_FILE), &report)
}

/// Reads `corpus.jsonl` without any manifest checks.
pub fn load_corpus(dir: &Path) -> Result<Vec<JobPosting>, ArtifactError> {
    decode_corpus(&read_component(dir, CORPUS_FILE)?)
}

/// Writes every component and the manifest describing them.
pub fn save_artifacts(
    dir: &Path,
    corpus: &Corpus,
    sparse: &SparseIndex,
    dense: &DenseIndex,
    embedder: &EmbedderSpec,
    ranker: &RankerConfig,
) -> Result<ArtifactManifest, ArtifactError> {
    let n = corpus.len();
    if sparse.num_documents() != n || dense.len() != n {
        return Err(ArtifactError::Inconsistent(format!(
            "corpus has {n} records, sparse index {}, dense index {}",
            sparse.num_documents(),
            dense.len()
        )));
    }
    if dense.dimension() != embedder.dimension() {
        return Err(ArtifactError::Inconsistent(format!(
            "dense index has dimension {}, embedder spec {}",
            dense.dimension(),
            embedder.dimension()
        )));
    }
    fs::create_dir_all(dir).map_err(|e| ArtifactError::io(dir, e))?;

    let parts = [
        (CORPUS_FILE, encode_corpus(corpus.postings())),
        (VOCAB_FILE, encode_vocab(sparse.vocabulary())),
        (SPARSE_FILE, encode_sparse(sparse)),
        (DENSE_FILE, encode_dense(dense)),
    ];
    let mut components = Vec::with_capacity(parts.len());
    for (file, bytes) in &parts {
        write_file(&dir.join(file), bytes)?;
        components.push(ComponentEntry {
            file: (*file).to_string(),
            checksum: checksum_bytes(bytes),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = ArtifactManifest {
        format_version: FORMAT_VERSION,
        created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        corpus_checksum: components[0].checksum.clone(),
        record_count: n,
        embedder_name: dense.embedder_name().to_string(),
        embedding_dimension: dense.dimension(),
        embedder: embedder.clone(),
        ranker: ranker.clone(),
        components,
    };
    let path = dir.join(MANIFEST_FILE);
    let file = fs::File::create(&path).map_err(|e| ArtifactError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &manifest)
        .map_err(|e| ArtifactError::io(&path, e.into()))?;
    w.write_all(b"\n")
        .and_then(|()| w.flush())
        .map_err(|e| ArtifactError::io(&path, e))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<ArtifactManifest, ArtifactError> {
    let path = dir.join(MANIFEST_FILE);
    let file = match fs::File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(ArtifactError::MissingComponent(MANIFEST_FILE.to_string()))
        }
        Err(e) => return Err(ArtifactError::io(&path, e)),
    };
    let value: serde_json::Value = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| ArtifactError::corrupt(MANIFEST_FILE, e.to_string()))?;
    // Check the version before the schema so newer manifests report a version error.
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| ArtifactError::corrupt(MANIFEST_FILE, "missing format_version"))?;
    if found != u64::from(FORMAT_VERSION) {
        return Err(ArtifactError::VersionMismatch {
            found,
            supported: FORMAT_VERSION,
        });
    }
    serde_json::from_value(value).map_err(|e| ArtifactError::corrupt(MANIFEST_FILE, e.to_string()))
}

fn verified(dir: &Path, manifest: &ArtifactManifest, file: &str) -> Result<Vec<u8>, ArtifactError> {
    let entry = manifest
        .component(file)
        .ok_or_else(|| ArtifactError::corrupt(MANIFEST_FILE, format!("no entry for {file}")))?;
    let bytes = read_component(dir, file)?;
    let actual = checksum_bytes(&bytes);
    if actual != entry.checksum {
        return Err(ArtifactError::ChecksumMismatch {
            file: file.to_string(),
            expected: entry.checksum.clone(),
            actual,
        });
    }
    Ok(bytes)
}

/// Reads and validates every component against the manifest.
pub fn load_artifacts(dir: &Path) -> Result<LoadedArtifacts, ArtifactError> {
    let manifest = read_manifest(dir)?;
    let corpus_bytes = verified(dir, &manifest, CORPUS_FILE)?;
    let vocab_bytes = verified(dir, &manifest, VOCAB_FILE)?;
    let sparse_bytes = verified(dir, &manifest, SPARSE_FILE)?;
    let dense_bytes = verified(dir, &manifest, DENSE_FILE)?;
    if checksum_bytes(&corpus_bytes) != manifest.corpus_checksum {
        return Err(ArtifactError::ChecksumMismatch {
            file: CORPUS_FILE.to_string(),
            expected: manifest.corpus_checksum.clone(),
            actual: checksum_bytes(&corpus_bytes),
        });
    }

    let corpus = Corpus::new(decode_corpus(&corpus_bytes)?)
        .map_err(|e| ArtifactError::corrupt(CORPUS_FILE, e))?;
    let vocabulary = decode_vocab(&vocab_bytes)?;
    let sparse = decode_sparse(&sparse_bytes, vocabulary)?;
    let dense = decode_dense(&dense_bytes)?;

    let n = manifest.record_count;
    if corpus.len() != n || sparse.num_documents() != n || dense.len() != n {
        return Err(ArtifactError::Inconsistent(format!(
            "manifest records {n}, corpus {}, sparse {}, dense {}",
            corpus.len(),
            sparse.num_documents(),
            dense.len()
        )));
    }
    if dense.dimension() != manifest.embedding_dimension
        || manifest.embedder.dimension() != dense.dimension()
    {
        return Err(ArtifactError::Inconsistent(format!(
            "manifest dimension {}, dense.bin dimension {}",
            manifest.embedding_dimension,
            dense.dimension()
        )));
    }
    if dense.embedder_name() != manifest.embedder_name {
        return Err(ArtifactError::Inconsistent(format!(
            "manifest embedder {}, dense.bin embedder {}",
            manifest.embedder_name,
            dense.embedder_name()
        )));
    }
    Ok(LoadedArtifacts {
        corpus,
        sparse,
        dense,
        manifest,
    })
}

/// Loads artifacts and rebuilds the embedder, ready to serve queries.
pub fn open_engine(dir: &Path) -> Result<(Engine, ArtifactManifest), crate::Error> {
    load_artifacts(dir)?.into_engine()
}

/// Counts JSON lines without parsing them.
pub fn count_lines(path: &Path) -> Result<usize, ArtifactError> {
    let f = fs::File::open(path).map_err(|e| ArtifactError::io(path, e))?;
    let mut n = 0;
    for line in BufReader::new(f).lines() {
        if !line.map_err(|e| ArtifactError::io(path, e))?.is_empty() {
            n += 1;
        }
    }
    Ok(n)
}
