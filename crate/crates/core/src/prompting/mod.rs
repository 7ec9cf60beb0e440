//! In-context example corpus and prompt construction.

pub mod corpus;
pub mod prompt;
pub mod select;

pub use corpus::{load_corpus, strip_omp_lines, CorpusError, IclCorpus, IclExample, PatternTag, TagSet};
pub use prompt::{build_prompt, estimate_tokens, suggested_clauses, Prompt, PromptError};
pub use select::{select_examples, tag_loop, SelectError};

/// Default number of examples per prompt.
pub const DEFAULT_K: usize = 3;

/// Default prompt budget in estimated tokens.
pub const DEFAULT_TOKEN_BUDGET: usize = 6000;
