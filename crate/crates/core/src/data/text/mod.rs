//! Review preprocessing, skip-gram embeddings and review vectors.

pub mod imdb;
mod preprocess;
pub mod sgns;
pub mod stem;
mod stopwords;
mod vocab;

pub use imdb::{attach_sentiment_label, Review};
pub use preprocess::preprocess;
pub use sgns::{train_sgns, vectorize_review, EmbeddingTable, SgnsConfig, SgnsModel};
pub use stopwords::{is_stop_word, STOP_WORDS};
pub use vocab::Vocab;
