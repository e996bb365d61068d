//! Template-based synthetic datasets and class-balance skewing.

mod skew;
mod stats;
mod template;

pub use skew::{skew_dataset, SkewSpec};
pub use stats::{dataset_stats, ClassCounts, DatasetStats};
pub use template::{
    generate_synthetic, PerTermTarget, Template, TemplateSpec, TERM_SLOT, WORD_SLOT,
};

/// The fourteen identity terms of the reference comparison table.
pub const REFERENCE_TERMS: [&str; 14] = [
    "gay",
    "homosexual",
    "lesbian",
    "transgender",
    "heterosexual",
    "middle eastern",
    "canadian",
    "mexican",
    "american",
    "elderly",
    "lgbt",
    "lgbtq",
    "younger",
    "white",
];
