//! Seeded parameter draws. Every draw is a pure function of
//! (seed, tag, case index), so results do not depend on thread scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::families::{CdhParams, ChahnParams, FamilyParams, MpParams, WilsonParams};
use crate::identities::{mp_cond, Aux, IdentityId, IdentityInput};
use crate::quadrature::{CorollaryId, CorollaryInput};
use crate::{Error, Result, C64};

const MAX_TRIES: usize = 1000;

/// FNV-1a, used to fold a tag into the seed.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, tag: &str, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(tag));
        rng.set_stream(index);
        Sampler { rng }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Real part in [0.1, 3].
    pub fn re(&mut self) -> f64 {
        self.rng.gen_range(0.1..=3.0)
    }

    /// Imaginary part of a conjugate pair, in [−2, 2].
    pub fn im(&mut self) -> f64 {
        self.rng.gen_range(-2.0..=2.0)
    }

    pub fn real_param(&mut self) -> C64 {
        C64::new(self.re(), 0.0)
    }

    pub fn complex_param(&mut self) -> C64 {
        C64::new(self.re(), self.im())
    }

    pub fn angle(&mut self) -> f64 {
        self.rng.gen_range(0.2..=PI - 0.2)
    }

    /// x in (0, 5].
    pub fn x_half(&mut self) -> f64 {
        5.0 * (1.0 - self.rng.gen::<f64>())
    }

    /// x in [−5, 5].
    pub fn x_whole(&mut self) -> f64 {
        self.rng.gen_range(-5.0..=5.0)
    }

    /// Uniform on the closed disk of the given radius.
    pub fn disk(&mut self, radius: f64) -> C64 {
        let r = radius * self.rng.gen::<f64>().sqrt();
        C64::from_polar(r, self.rng.gen_range(0.0..2.0 * PI))
    }

    /// Either a real value or a conjugate pair.
    pub fn pair_or_reals(&mut self) -> (C64, C64) {
        if self.rng.gen_bool(0.5) {
            let z = self.complex_param();
            (z, z.conj())
        } else {
            (self.real_param(), self.real_param())
        }
    }

    /// Wilson parameters. When `fixed_last` the conjugate pairs avoid d, so
    /// that d may be replaced by a free real parameter.
    pub fn wilson(&mut self, fixed_last: bool) -> WilsonParams {
        let (p, q) = self.pair_or_reals();
        let (r, s) = if fixed_last { (self.real_param(), self.real_param()) } else { self.pair_or_reals() };
        // pair positions: (b,c) and (a,d)
        WilsonParams::new(r, p, q, s).expect("conjugate-closed by construction")
    }

    /// CDH parameters with an optional conjugate pair at positions `pair`.
    pub fn cdh(&mut self, pair: (usize, usize)) -> CdhParams {
        let mut v = [self.real_param(), self.real_param(), self.real_param()];
        if self.rng.gen_bool(0.5) {
            let z = self.complex_param();
            v[pair.0] = z;
            v[pair.1] = z.conj();
        }
        CdhParams::new(v[0], v[1], v[2]).expect("conjugate-closed by construction")
    }

    /// CH parameters sharing one imaginary part.
    pub fn chahn(&mut self) -> ChahnParams {
        let im = self.im();
        ChahnParams::new(C64::new(self.re(), im), C64::new(self.re(), im)).expect("valid by construction")
    }

    pub fn mp(&mut self) -> MpParams {
        MpParams::new(self.re(), self.angle()).expect("valid by construction")
    }

    /// Parameters of any family, used by the family-wide properties.
    pub fn family_params(&mut self, family: crate::families::Family) -> FamilyParams {
        use crate::families::Family;
        match family {
            Family::Wilson => FamilyParams::Wilson(self.wilson(false)),
            Family::Cdh => FamilyParams::Cdh(self.cdh((1, 2))),
            Family::Chahn => FamilyParams::Chahn(self.chahn()),
            Family::Mp => FamilyParams::Mp(self.mp()),
        }
    }

    pub fn x_for(&mut self, family: crate::families::Family) -> f64 {
        if family.half_line() {
            self.x_half()
        } else {
            self.x_whole()
        }
    }
}

/// Largest |ρ| allowed by |ρ|(sin φ + |sin(ψ−φ)|) < sin ψ.
pub fn mp_cond_radius(phi: f64, psi: f64) -> f64 {
    psi.sin() / (phi.sin() + (psi - phi).sin().abs())
}

/// Radius of the disk ρ is drawn from, at most 90% of each domain bound.
pub fn rho_radius(id: IdentityId, params: &FamilyParams, aux: &Aux) -> f64 {
    use IdentityId::*;
    match id {
        WGf1 | WT1 | CdhGf1 | CdhL6 | CdhT1 => 0.5,
        WGf2 | WT2 | ChT2 => 0.15,
        CdhT3 => 0.45,
        CdhT2 | ChT1 | MpT2 => 2.0,
        MpT1 | MpT1e | MpT3 => {
            let (phi, psi) = match params {
                FamilyParams::Mp(p) => (p.phi, aux.psi.unwrap_or(p.phi)),
                _ => return 0.0,
            };
            let r = 0.5 * mp_cond_radius(phi, psi);
            if id == MpT3 {
                // keeps |(1 − e^{−2iφ})ρ/(ρ−1)| ≤ 0.9
                r.min(0.9 / (2.0 * phi.sin() + 0.9))
            } else {
                r
            }
        }
    }
}

/// One unchecked draw; callers reject inputs that fail the domain check.
pub fn draw_identity_with(id: IdentityId, s: &mut Sampler) -> IdentityInput {
    use IdentityId::*;
    let mut aux = Aux::default();
    let params = match id {
        WGf1 | WGf2 => FamilyParams::Wilson(s.wilson(false)),
        WT1 | WT2 => {
            aux.h = Some(s.real_param());
            FamilyParams::Wilson(s.wilson(true))
        }
        CdhGf1 => FamilyParams::Cdh(s.cdh((1, 2))),
        CdhL6 => {
            aux.d = Some(s.complex_param());
            aux.f = Some(s.complex_param());
            FamilyParams::Cdh(CdhParams::new(s.real_param(), s.real_param(), s.real_param()).expect("real"))
        }
        CdhT1 => {
            aux.f = Some(s.real_param());
            FamilyParams::Cdh(s.cdh((0, 2)))
        }
        CdhT2 | CdhT3 => {
            aux.d = Some(s.real_param());
            if id == CdhT3 {
                aux.gamma = Some(s.complex_param());
            }
            FamilyParams::Cdh(s.cdh((0, 1)))
        }
        ChT1 | ChT2 => {
            let p = s.chahn();
            aux.c = Some(C64::new(s.re(), p.a.im));
            FamilyParams::Chahn(p)
        }
        MpT1 | MpT1e | MpT2 | MpT3 => {
            aux.psi = Some(s.angle());
            if id == MpT3 {
                aux.gamma = Some(s.complex_param());
            }
            FamilyParams::Mp(s.mp())
        }
    };
    let x = s.x_for(id.family());
    let rho = s.disk(rho_radius(id, &params, &aux));
    IdentityInput { id, params, aux, x, rho }
}

/// Random in-domain input for an identity, keyed by (seed, tag, index).
pub fn draw_identity(id: IdentityId, seed: u64, index: u64) -> Result<IdentityInput> {
    let mut s = Sampler::new(seed, id.tag(), index);
    for _ in 0..MAX_TRIES {
        let inp = draw_identity_with(id, &mut s);
        if inp.check_domain().is_ok() {
            return Ok(inp);
        }
    }
    Err(Error::Domain(format!("no admissible draw for {id}")))
}

/// Random parameters for a corollary; ρ and k are filled in by the caller.
/// Draws are rejected until every ρ in `rhos` satisfies the hypotheses.
pub fn draw_corollary(id: CorollaryId, seed: u64, index: u64, rhos: &[C64]) -> Result<CorollaryInput> {
    let mut s = Sampler::new(seed, id.tag(), index);
    for _ in 0..MAX_TRIES {
        let base = draw_identity_with(id.identity(), &mut s);
        let inp = CorollaryInput { id, k: 0, params: base.params, aux: base.aux, rho: C64::new(0.0, 0.0) };
        let ok = inp.target().is_ok()
            && rhos.iter().all(|&rho| {
                let probe = IdentityInput { rho, ..base };
                let mp_ok = match (id, base.params) {
                    (CorollaryId::Imp1 | CorollaryId::Imp3, FamilyParams::Mp(p)) => {
                        mp_cond(p.phi, base.aux.psi.unwrap_or(p.phi), rho)
                    }
                    _ => true,
                };
                mp_ok && probe.check_domain().is_ok()
            });
        if ok {
            return Ok(inp);
        }
    }
    Err(Error::Domain(format!("no admissible draw for {id}")))
}
