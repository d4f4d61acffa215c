//! Skip-gram with negative sampling: a single linear hidden layer trained
//! with closed-form logistic-loss gradients and plain SGD.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::{axpy, dot, sigmoid, Matrix, Rng};

use super::Vocab;

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub min_count: u64,
    pub epochs: usize,
    pub lr: f64,
    /// Floor for the linearly decayed learning rate, as a fraction of `lr`.
    pub min_lr_frac: f64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            min_count: 5,
            epochs: 5,
            lr: 0.025,
            min_lr_frac: 1e-4,
        }
    }
}

/// Word vectors (`V × d`) aligned with a token list.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    tokens: Vec<String>,
    vectors: Matrix,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(tokens: Vec<String>, vectors: Matrix) -> Result<Self> {
        if tokens.len() != vectors.rows() {
            return Err(Error::dim(
                "EmbeddingTable::new",
                (tokens.len(), 0),
                vectors.shape(),
            ));
        }
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(EmbeddingTable {
            tokens,
            vectors,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.vectors.row(i))
    }

    /// Word-vector text format: a `V d` header, then one token and its `d`
    /// values per line. Values use the shortest round-tripping decimal form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.len(), self.dim());
        for (i, t) in self.tokens.iter().enumerate() {
            s.push_str(t);
            for v in self.vectors.row(i) {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format(0, "empty embedding file"))?;
        let mut parts = header.split_whitespace().map(str::parse::<usize>);
        let (v, d) = match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(v)), Some(Ok(d)), None) => (v, d),
            _ => return Err(Error::format(0, format!("bad header `{header}`"))),
        };
        let mut tokens = Vec::with_capacity(v);
        let mut data = Vec::with_capacity(v * d);
        let mut offset = header.len() + 1;
        for line in lines.by_ref().take(v) {
            let mut fields = line.split(' ');
            let tok = fields.next().unwrap_or_default();
            tokens.push(tok.to_string());
            let before = data.len();
            for f in fields {
                data.push(
                    f.parse::<f64>()
                        .map_err(|e| Error::format(offset, format!("bad value `{f}`: {e}")))?,
                );
            }
            if data.len() - before != d {
                return Err(Error::format(
                    offset,
                    format!("expected {d} values for `{tok}`"),
                ));
            }
            offset += line.len() + 1;
        }
        if tokens.len() != v {
            return Err(Error::format(
                offset,
                format!("expected {v} rows, found {}", tokens.len()),
            ));
        }
        EmbeddingTable::new(tokens, Matrix::from_vec(v, d, data)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::data(path, e))?;
        Self::from_text(&text)
    }
}

/// Input (centre) and output (context) vectors of the skip-gram model.
#[derive(Debug, Clone)]
pub struct SgnsModel {
    pub input: Matrix,
    pub output: Matrix,
}

/// Gradients of one (centre, context, negatives) term.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGrads {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
    pub loss: f64,
}

impl SgnsModel {
    /// word2vec initialization: inputs uniform in ±0.5/d, outputs zero.
    pub fn init(vocab_size: usize, dim: usize, rng: &mut Rng) -> Self {
        let half = 0.5 / dim.max(1) as f64;
        let data = (0..vocab_size * dim)
            .map(|_| rng.uniform_range(-half, half))
            .collect();
        SgnsModel {
            input: Matrix::from_vec(vocab_size, dim, data).expect("length matches"),
            output: Matrix::zeros(vocab_size, dim),
        }
    }

    /// `−ln σ(u_o·v_c) − Σₙ ln σ(−u_n·v_c)`
    pub fn pair_loss(&self, center: usize, context: usize, negatives: &[usize]) -> f64 {
        let v = self.input.row(center);
        let mut loss = -sigmoid(dot(self.output.row(context), v)).ln();
        for &n in negatives {
            loss -= sigmoid(-dot(self.output.row(n), v)).ln();
        }
        loss
    }

    pub fn pair_grads(&self, center: usize, context: usize, negatives: &[usize]) -> PairGrads {
        let v = self.input.row(center);
        let u_o = self.output.row(context);
        let s_o = sigmoid(dot(u_o, v));
        let mut g_center: Vec<f64> = u_o.iter().map(|x| (s_o - 1.0) * x).collect();
        let g_context: Vec<f64> = v.iter().map(|x| (s_o - 1.0) * x).collect();
        let mut loss = -s_o.max(f64::MIN_POSITIVE).ln();
        let mut g_negs = Vec::with_capacity(negatives.len());
        for &n in negatives {
            let u_n = self.output.row(n);
            let s_n = sigmoid(dot(u_n, v));
            loss -= (1.0 - s_n).max(f64::MIN_POSITIVE).ln();
            axpy(s_n, u_n, &mut g_center);
            g_negs.push(v.iter().map(|x| s_n * x).collect());
        }
        PairGrads {
            center: g_center,
            context: g_context,
            negatives: g_negs,
            loss,
        }
    }

    /// One SGD step on a single (centre, context, negatives) term.
    pub fn sgd_step(&mut self, center: usize, context: usize, negatives: &[usize], lr: f64) -> f64 {
        let g = self.pair_grads(center, context, negatives);
        axpy(-lr, &g.context, self.output.row_mut(context));
        for (&n, gn) in negatives.iter().zip(&g.negatives) {
            axpy(-lr, gn, self.output.row_mut(n));
        }
        axpy(-lr, &g.center, self.input.row_mut(center));
        g.loss
    }
}

/// Cumulative unigram^0.75 table for drawing noise words.
#[derive(Debug, Clone)]
pub struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    pub fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.next_uniform() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// Trains SGNS vectors over `corpus` (already tokenized) and returns the
/// input vectors for every vocabulary word.
pub fn train_sgns<S: AsRef<str>>(
    corpus: &[Vec<S>],
    cfg: &SgnsConfig,
    rng: &mut Rng,
) -> Result<EmbeddingTable> {
    if corpus.iter().all(Vec::is_empty) {
        return Err(Error::usage("cannot train embeddings on an empty corpus"));
    }
    let vocab = Vocab::build(corpus, cfg.min_count);
    if vocab.is_empty() {
        return Err(Error::usage(format!(
            "no token occurs at least {} times",
            cfg.min_count
        )));
    }
    let docs: Vec<Vec<usize>> = corpus.iter().map(|d| vocab.encode(d)).collect();
    let model = train_sgns_ids(&docs, &vocab, cfg, rng);
    EmbeddingTable::new(vocab.tokens().to_vec(), model.input)
}

pub fn train_sgns_ids(
    docs: &[Vec<usize>],
    vocab: &Vocab,
    cfg: &SgnsConfig,
    rng: &mut Rng,
) -> SgnsModel {
    let mut model = SgnsModel::init(vocab.len(), cfg.dim, rng);
    let noise = NoiseTable::new(vocab.counts());
    let words_per_epoch: usize = docs.iter().map(Vec::len).sum();
    let total = (words_per_epoch * cfg.epochs).max(1) as f64;
    let mut processed = 0usize;
    let mut negs = Vec::with_capacity(cfg.negatives);
    for _ in 0..cfg.epochs {
        for doc in docs {
            for (i, &center) in doc.iter().enumerate() {
                let lr = cfg.lr * (1.0 - processed as f64 / total).max(cfg.min_lr_frac);
                processed += 1;
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(doc.len());
                for (j, &context) in doc.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    negs.clear();
                    for _ in 0..cfg.negatives {
                        let n = noise.sample(rng);
                        if n != context {
                            negs.push(n);
                        }
                    }
                    model.sgd_step(center, context, &negs, lr);
                }
            }
        }
    }
    model
}

/// SHA-256 over the tokenized corpus and the training settings; used to
/// decide whether a cached table can be reused.
pub fn corpus_hash<S: AsRef<str>>(corpus: &[Vec<S>], cfg: &SgnsConfig, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(format!("{cfg:?} seed={seed}\n").as_bytes());
    for doc in corpus {
        for t in doc {
            h.update(t.as_ref().as_bytes());
            h.update(b" ");
        }
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads the table at `path` when its sidecar hash matches, otherwise
/// trains and writes both files.
pub fn train_or_load<S: AsRef<str>>(
    corpus: &[Vec<S>],
    cfg: &SgnsConfig,
    seed: u64,
    path: &Path,
) -> Result<EmbeddingTable> {
    let hash = corpus_hash(corpus, cfg, seed);
    let meta = path.with_extension("meta");
    if let Ok(stored) = std::fs::read_to_string(&meta) {
        if stored.trim() == hash && path.is_file() {
            return EmbeddingTable::load(path);
        }
    }
    let table = train_sgns(corpus, cfg, &mut Rng::new(seed))?;
    table.save(path)?;
    std::fs::write(&meta, format!("{hash}\n")).map_err(|e| Error::io(&meta, e))?;
    Ok(table)
}

/// Mean of the in-vocabulary word vectors; zero when none are known.
pub fn vectorize_review<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> Vec<f64> {
    let mut acc = vec![0.0; table.dim()];
    let mut n = 0usize;
    for t in tokens {
        if let Some(v) = table.get(t.as_ref()) {
            axpy(1.0, v, &mut acc);
            n += 1;
        }
    }
    if n > 0 {
        let inv = 1.0 / n as f64;
        acc.iter_mut().for_each(|v| *v *= inv);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        EmbeddingTable::new(
            vec!["good".into(), "bad".into()],
            Matrix::from_rows(&[vec![1.0, 2.0, -0.5], vec![3.0, 0.0, 0.5]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn vectorize_examples() {
        let t = table();
        assert_eq!(vectorize_review(&["good"], &t), vec![1.0, 2.0, -0.5]);
        assert_eq!(vectorize_review(&["meh", "zzz"], &t), vec![0.0; 3]);
        assert_eq!(vectorize_review::<&str>(&[], &t), vec![0.0; 3]);
        assert_eq!(vectorize_review(&["good", "bad"], &t), vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn text_format_round_trips() {
        let t = table();
        let text = t.to_text();
        assert!(text.starts_with("2 3\ngood 1 2 -0.5\n"));
        assert_eq!(EmbeddingTable::from_text(&text).unwrap(), t);
        assert!(EmbeddingTable::from_text("2 3\ngood 1 2\n").is_err());
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let corpus = vec![vec!["a", "b", "a", "c"]; 3];
        let cfg = SgnsConfig {
            dim: 4,
            min_count: 1,
            epochs: 0,
            ..SgnsConfig::default()
        };
        let table = train_sgns(&corpus, &cfg, &mut Rng::new(5)).unwrap();
        let vocab = Vocab::build(&corpus, 1);
        let init = SgnsModel::init(vocab.len(), 4, &mut Rng::new(5));
        assert_eq!(table.vectors(), &init.input);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let corpus: Vec<Vec<&str>> = vec![vec![], vec![]];
        assert!(matches!(
            train_sgns(&corpus, &SgnsConfig::default(), &mut Rng::new(0)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn noise_table_favours_frequent_words() {
        let noise = NoiseTable::new(&[1000, 10, 1]);
        let mut rng = Rng::new(2);
        let mut hits = [0usize; 3];
        for _ in 0..10_000 {
            hits[noise.sample(&mut rng)] += 1;
        }
        assert!(
            hits[0] > hits[1] && hits[1] > hits[2] && hits[2] > 0,
            "{hits:?}"
        );
    }
}
