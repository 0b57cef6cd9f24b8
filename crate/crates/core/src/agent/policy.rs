use rand::Rng;

use crate::ingest::UpdateAction;
use crate::Scalar;

/// Binary step over `q` (exactly zero maps to "no update"); with probability
/// `epsilon` per pt the bit is replaced by a fair coin.
pub fn select_action<T: Scalar, R: Rng + ?Sized>(q: &[T], epsilon: f64, rng: &mut R) -> UpdateAction {
    let bits = q
        .iter()
        .map(|&v| if epsilon > 0.0 && rng.random_bool(epsilon) { rng.random_bool(0.5) } else { v > T::zero() })
        .collect();
    UpdateAction::new(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn greedy_step_with_tie_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = select_action(&[0.5, -0.2, 0.0], 0.0, &mut rng);
        assert_eq!(a.bits(), &[true, false, false]);
    }

    #[test]
    fn full_exploration_is_seeded() {
        let q = [1.0f64; 64];
        let a = select_action(&q, 1.0, &mut ChaCha8Rng::seed_from_u64(9));
        let b = select_action(&q, 1.0, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        let ones = a.count_ones();
        assert!(ones > 10 && ones < 54, "{ones}");
    }
}
