//! Cross-module tests against independent oracles.

mod pipeline;
