use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{DataSpec, Generator};
use crate::error::{Error, Result};
use crate::functionals::energy;
use crate::spectral::{CauchyPair, ModalOperator, ModalVector};

/// Physical profile of a grid-sampled generator, or `None` for the modal ones.
pub fn profile(generator: &Generator) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    match *generator {
        Generator::Gaussian { center, width } => {
            Some(Box::new(move |x| (-(x - center) * (x - center) / (2.0 * width * width)).exp()))
        }
        Generator::Bump { support: [lo, hi] } => Some(Box::new(move |x| bump(x, lo, hi))),
        Generator::HeavyTail { .. } | Generator::RandomEnergy { .. } => None,
    }
}

/// Smooth bump with peak 1 at the midpoint of `[lo, hi]`.
pub fn bump(x: f64, lo: f64, hi: f64) -> f64 {
    let y = (2.0 * x - lo - hi) / (hi - lo);
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// `λ^{(δ - 1/2)/2} e^{-λ}`, zero on the kernel.
pub fn heavy_tail_coefficients(op: &ModalOperator, delta: f64) -> ModalVector {
    op.lambdas()
        .map(|l| if l > 0.0 { l.powf(0.5 * (delta - 0.5)) * (-l).exp() } else { 0.0 })
        .collect::<Vec<_>>()
        .into()
}

/// Random data rescaled to `E(0) = 1`, reproducible from `seed`.
pub fn random_energy(op: &ModalOperator, seed: u64) -> Result<(ModalVector, ModalVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = op.len() as f64;
    let mut u0 = Vec::with_capacity(op.len());
    let mut u1 = Vec::with_capacity(op.len());
    for mode in op.modes() {
        let g0: f64 = StandardNormal.sample(&mut rng);
        let g1: f64 = StandardNormal.sample(&mut rng);
        u0.push(g0 / (mode.weight * (1.0 + mode.lambda) * m).sqrt());
        u1.push(g1 / (mode.weight * m).sqrt());
    }
    let (u0, u1) = (ModalVector::new(u0), ModalVector::new(u1));
    let e = energy(op, &u0, &u1)?;
    if !(e > 0.0) {
        return Err(Error::Degenerate("random data has zero energy".into()));
    }
    let s = e.sqrt().recip();
    Ok((u0.scale(s), u1.scale(s)))
}

/// Scales a common shape into the Cauchy pair, or draws random data.
pub fn assemble(spec: &DataSpec, op: &ModalOperator, shape: Option<ModalVector>) -> Result<CauchyPair> {
    match (&spec.generator, shape) {
        (Generator::RandomEnergy { seed }, _) => {
            let (u0, u1) = random_energy(op, seed.unwrap_or_default())?;
            CauchyPair::new(u0.scale(spec.u0_scale), u1.scale(spec.u1_scale))
        }
        (Generator::HeavyTail { delta }, _) => {
            let c = heavy_tail_coefficients(op, *delta);
            CauchyPair::new(c.scale(spec.u0_scale), c.scale(spec.u1_scale))
        }
        (_, Some(c)) => CauchyPair::new(c.scale(spec.u0_scale), c.scale(spec.u1_scale)),
        (_, None) => Err(Error::Degenerate("grid generator evaluated without a shape".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_compact_and_peaks_at_one() {
        assert_eq!(bump(2.0, 2.0, 4.0), 0.0);
        assert_eq!(bump(4.5, 2.0, 4.0), 0.0);
        assert_eq!(bump(3.0, 2.0, 4.0), 1.0);
        assert!(bump(2.01, 2.0, 4.0) > 0.0);
    }

    #[test]
    fn random_energy_is_seeded_and_normalised() {
        let lambdas: Vec<f64> = (1..=4000).map(|k| (k as f64 * 0.01).powi(2)).collect();
        let op = ModalOperator::from_eigenvalues("test", &lambdas).unwrap();
        let (a0, a1) = random_energy(&op, 7).unwrap();
        let (b0, b1) = random_energy(&op, 7).unwrap();
        assert_eq!(a0, b0);
        assert_eq!(a1, b1);
        let (c0, _) = random_energy(&op, 8).unwrap();
        assert_ne!(a0, c0);
        let e = energy(&op, &a0, &a1).unwrap();
        assert!((e - 1.0).abs() < 1e-12, "{e}");
    }
}
