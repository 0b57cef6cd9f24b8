use super::IngestError;

/// Per-pt update decision for one tick: `true` applies the head of that pt's
/// queue, `false` drops it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpdateAction {
    bits: Vec<bool>,
}

impl UpdateAction {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self, IngestError> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(IngestError::BadActionBit(other)),
            })
            .collect::<Result<_, _>>()
            .map(Self::new)
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bits as 0/1 values, e.g. for dot products with Q outputs.
    pub fn as_indicator<T: crate::Scalar>(&self) -> impl Iterator<Item = T> + '_ {
        self.bits.iter().map(|&b| if b { T::one() } else { T::zero() })
    }
}
