/// Synthetic linear energy model, in millijoules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    /// Per store memory operation.
    pub c_op: f64,
    /// Per payload byte processed.
    pub c_byte: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self { c_op: 1.0, c_byte: 0.001 }
    }
}

impl EnergyModel {
    pub fn new(c_op: f64, c_byte: f64) -> Option<Self> {
        (c_op >= 0.0 && c_byte >= 0.0 && c_op.is_finite() && c_byte.is_finite()).then_some(Self { c_op, c_byte })
    }
}

pub fn energy_proxy(mem_ops: u64, bytes: u64, m: &EnergyModel) -> f64 {
    m.c_op * mem_ops as f64 + m.c_byte * bytes as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula() {
        let m = EnergyModel::default();
        assert_eq!(energy_proxy(0, 0, &m), 0.0);
        assert!((energy_proxy(10, 1000, &m) - 11.0).abs() < 1e-12);
        assert_eq!(energy_proxy(14, 0, &m), 2.0 * energy_proxy(7, 0, &m));
        assert!(EnergyModel::new(-1.0, 0.0).is_none());
    }
}
