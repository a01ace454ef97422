#![allow(dead_code)]

use ebxii_core::rng::UniformStream;
use ebxii_core::{Ebxii, GSpec, Guard, ParamVector, Variant};

pub struct Draw(pub UniformStream);

impl Draw {
    pub fn new(seed: u64) -> Self {
        Draw(UniformStream::new(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_open01()
    }
}

/// Random parameters that pass the construction guard and give a proper
/// distribution.
pub fn random_theta(variant: Variant, draw: &mut Draw) -> ParamVector {
    loop {
        let a = draw.uniform(0.5, 5.0);
        let b = draw.uniform(0.5, 2.0);
        let c = draw.uniform(0.3, 3.0);
        let d = match variant {
            Variant::G0 => draw.uniform(0.0, 3.0),
            _ => draw.uniform(1.2, 4.0),
        };
        let eps = draw.uniform(0.5, 2.0);
        let p = draw.uniform(0.5, 2.0);
        let all = [a, b, c, d, eps, p];
        let theta = ParamVector::new(variant, &all[..variant.arity()]).unwrap();
        if let Ok(dist) = theta.to_dist(Guard::Scan) {
            if dist.is_proper() {
                return theta;
            }
        }
    }
}

pub fn dist(theta: &ParamVector) -> Ebxii {
    theta.to_dist(Guard::Scan).unwrap()
}

pub fn g(variant: Variant, b: f64, c: f64) -> GSpec {
    match variant {
        Variant::G0 => GSpec::g0(b, c, 1.5),
        Variant::G1 => GSpec::g1(b, c, 1.5, 1.0, 1.0),
        Variant::G2 => GSpec::g2(b, c, 1.5, 1.0, 1.0),
        Variant::G3 => GSpec::g3(b, c, 1.5, 1.0),
    }
    .unwrap()
}

/// Sixteen reference members: `a = 3`, `d = 1.5`,
/// `eps = p = 1`, `(b, c)` over the four combinations.
pub fn reference_rows() -> Vec<(Variant, f64, f64, Ebxii)> {
    let mut out = Vec::new();
    for v in Variant::ALL {
        for (b, c) in [(0.8, 1.0), (1.2, 1.0), (0.8, 0.5), (1.2, 0.5)] {
            out.push((v, b, c, Ebxii::new(3.0, g(v, b, c)).unwrap()));
        }
    }
    out
}
