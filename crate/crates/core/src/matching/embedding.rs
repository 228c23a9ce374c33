use num_traits::Float;

use crate::error::EmbedError;

/// Provider id of the deterministic bigram embedder.
pub const MOCK_EMBEDDER_ID: &str = "mock-bigram-1024";

/// Dense language embedding with nonzero norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector<F = f64> {
    values: Vec<F>,
}

impl<F: Float> EmbeddingVector<F> {
    pub fn new(values: Vec<F>) -> Result<Self, EmbedError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::ProviderUnavailable(
                "embedding is empty or has non-finite entries".into(),
            ));
        }
        if values.iter().all(|v| v.is_zero()) {
            return Err(EmbedError::ZeroVector);
        }
        Ok(Self { values })
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn norm(&self) -> F {
        self.values.iter().fold(F::zero(), |acc, v| acc + *v * *v).sqrt()
    }
}

/// Source of language embeddings for symbol descriptions.
///
/// Implementations must return the same vector for the same text within a
/// process; remote providers achieve this by caching.
pub trait EmbeddingProvider: Send + Sync {
    fn model_id(&self) -> &str;

    fn embed_text(&self, text: &str) -> Result<Vec<f64>, EmbedError>;
}

/// Embeds nonempty text and checks the provider's output.
pub fn embed(provider: &dyn EmbeddingProvider, text: &str) -> Result<EmbeddingVector<f64>, EmbedError> {
    if text.trim().is_empty() {
        return Err(EmbedError::EmptyInput);
    }
    EmbeddingVector::new(provider.embed_text(text)?)
}

/// Cosine of the angle between two embeddings, clamped to `[-1, 1]`.
pub fn cosine_similarity<F: Float>(u: &EmbeddingVector<F>, v: &EmbeddingVector<F>) -> Result<F, EmbedError> {
    if u.dimension() != v.dimension() {
        return Err(EmbedError::DimensionMismatch(u.dimension(), v.dimension()));
    }
    if u.values == v.values {
        return Ok(F::one());
    }
    let dot = u
        .values
        .iter()
        .zip(&v.values)
        .fold(F::zero(), |acc, (a, b)| acc + *a * *b);
    let cos = dot / (u.norm() * v.norm());
    Ok(cos.max(-F::one()).min(F::one()))
}

/// Character-bigram counts over lowercased text, bucketed into 32x32 cells
/// by code point modulo 32, then L2-normalized.
///
/// Single-character input uses the doubled character as its only bigram.
/// Within the lowercase Latin letters and space the bucketing is injective,
/// so strings with no bigram in common there have similarity exactly zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockBigramEmbedder;

impl MockBigramEmbedder {
    pub const DIMENSION: usize = 1024;

    pub fn bucket(a: char, b: char) -> usize {
        ((a as u32 % 32) * 32 + (b as u32 % 32)) as usize
    }

    pub fn counts(text: &str) -> Vec<f64> {
        let chars: Vec<char> = text.to_lowercase().chars().collect();
        let mut counts = vec![0.0; Self::DIMENSION];
        match chars.len() {
            0 => {}
            1 => counts[Self::bucket(chars[0], chars[0])] += 1.0,
            _ => {
                for pair in chars.windows(2) {
                    counts[Self::bucket(pair[0], pair[1])] += 1.0;
                }
            }
        }
        counts
    }
}

impl EmbeddingProvider for MockBigramEmbedder {
    fn model_id(&self) -> &str {
        MOCK_EMBEDDER_ID
    }

    fn embed_text(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        if text.is_empty() {
            return Err(EmbedError::EmptyInput);
        }
        let mut counts = Self::counts(text);
        let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
        for c in &mut counts {
            *c /= norm;
        }
        Ok(counts)
    }
}
