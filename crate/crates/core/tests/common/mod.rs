#![allow(dead_code)]

use ico_netsim::{Complex64, StateVector, Unitary};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

pub fn random_state(rng: &mut impl Rng, num_qubits: usize) -> StateVector {
    let len = 1usize << num_qubits;
    loop {
        let amps: Vec<Complex64> = (0..len).map(|_| random_complex(rng)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let amps = amps.into_iter().map(|a| a / norm).collect();
            return StateVector::new(amps).unwrap();
        }
    }
}

/// Random product state over `num_qubits` single-qubit factors.
pub fn random_product_state(rng: &mut impl Rng, num_qubits: usize) -> StateVector {
    let mut parts = Vec::with_capacity(num_qubits);
    for _ in 0..num_qubits {
        parts.push(random_state(rng, 1));
    }
    ico_netsim::tensor(&parts).unwrap()
}

/// Haar-ish random 2x2 unitary via Gram-Schmidt on random complex columns.
pub fn random_unitary2(rng: &mut impl Rng) -> Unitary {
    loop {
        let v0 = [random_complex(rng), random_complex(rng)];
        let v1 = [random_complex(rng), random_complex(rng)];
        let n0 = (v0[0].norm_sqr() + v0[1].norm_sqr()).sqrt();
        if n0 < 1e-3 {
            continue;
        }
        let c0 = [v0[0] / n0, v0[1] / n0];
        let proj = c0[0].conj() * v1[0] + c0[1].conj() * v1[1];
        let w = [v1[0] - proj * c0[0], v1[1] - proj * c0[1]];
        let n1 = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        if n1 < 1e-3 {
            continue;
        }
        let c1 = [w[0] / n1, w[1] / n1];
        // columns c0, c1 in row-major layout
        return Unitary::new(2, vec![c0[0], c1[0], c0[1], c1[1]]).unwrap();
    }
}

pub fn random_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Independent partial-trace oracle: form |ψ⟩⟨ψ| explicitly and contract the
/// environment indices pairwise.
pub fn brute_force_reduce(state: &StateVector, keep: &[usize]) -> Vec<Vec<Complex64>> {
    let n = state.num_qubits();
    let len = state.len();
    let k = keep.len();
    let dim = 1usize << k;
    let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    let amps = state.amplitudes();
    for i in 0..len {
        for j in 0..len {
            let mut env_equal = true;
            for q in 0..n {
                if !keep.contains(&q) && bit(i, q) != bit(j, q) {
                    env_equal = false;
                    break;
                }
            }
            if !env_equal {
                continue;
            }
            let mut r = 0usize;
            let mut c = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                r |= bit(i, q) << (k - 1 - pos);
                c |= bit(j, q) << (k - 1 - pos);
            }
            rho[r][c] += amps[i] * amps[j].conj();
        }
    }
    rho
}
