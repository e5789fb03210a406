#![allow(dead_code)]

use causal_definetti::linalg;
use causal_definetti::process::{random_cptp, ProcessMatrix};
use causal_definetti::tensor::{HermOp, SpaceLayout};
use causal_definetti::CMatrix;

pub fn random_herm(layout: SpaceLayout, seed: u64) -> HermOp {
    let mut rng = linalg::seeded(seed);
    let d = layout.total_dim();
    HermOp::new(layout, linalg::random_hermitian(d, &mut rng)).unwrap()
}

pub fn random_state(layout: SpaceLayout, seed: u64) -> HermOp {
    let mut rng = linalg::seeded(seed);
    let d = layout.total_dim();
    HermOp::new(layout, linalg::random_density(d, &mut rng)).unwrap()
}

/// `rho` into `A`, a random channel from `A_O` to `B_I`, `B_O` discarded.
pub fn random_comb(d: usize, seed: u64) -> ProcessMatrix {
    let mut rng = linalg::seeded(seed);
    let rho = linalg::random_density(d, &mut rng);
    let channel = random_cptp(d, d, seed.wrapping_add(1));
    let m: CMatrix = rho.kronecker(channel.op.entries()).kronecker(&linalg::identity(d));
    let layout = SpaceLayout::sites(&[("A", d, d), ("B", d, d)]).unwrap();
    ProcessMatrix::new(HermOp::new(layout, m).unwrap()).unwrap()
}

pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
