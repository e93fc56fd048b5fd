//! Speaker- and listener-aware gender rewriting for Arabic.
//!
//! The pipeline identifies first- and second-person gender marks on each
//! word, generates out-of-context alternatives for the words whose marks
//! conflict with the requested target genders, and picks the best sentence
//! with a trigram language model.
//!
//! ```no_run
//! use ginaz::{corpus, engine::Engine, text::TargetSpec};
//!
//! let bundle = corpus::load_bundle("model".as_ref())?;
//! let engine = Engine::new(bundle);
//! let result = engine.rewrite("أنا طبيب وأنت ممرضة", &TargetSpec::all());
//! for variant in &result.variants {
//!     println!("{}\t{}", variant.combo, variant.text());
//! }
//! # Ok::<(), ginaz::error::BundleError>(())
//! ```

pub mod corpus;
pub mod engine;
pub mod error;
pub mod eval;
pub mod generate;
pub mod identify;
pub mod rank;
pub mod text;
pub mod translate;

pub use corpus::ModelBundle;
pub use engine::{Engine, RewriteResult, TargetCombo};
pub use text::{Gender, GenderMark, Person, Sentence, TargetSpec, Token, TokenLabel};
