//! Word vectors: vocabulary construction, skip-gram training with negative
//! sampling, and the sentence encodings the classifiers consume (mean-pooled
//! vectors for the classic models, padded sequences for the recurrent ones).

mod encode;
mod io;
mod sgns;
mod vocab;

pub use encode::{encode_sequence, pool_sentence, PooledEncoding, SequenceEncoding, DEFAULT_SEQUENCE_LEN};
pub use io::{load_text, read_text, save_text, write_text};
pub(crate) use sgns::sigmoid;
pub use sgns::{
    cosine, init_embeddings, pair_loss, pair_loss_grad, train_sgns, EmbeddingMatrix, NoiseSampler, PairGradient,
    SgnsParams,
};
pub use vocab::{build_vocab, Vocab, DEFAULT_MIN_COUNT};
