//! Library side of the `askey` command: flag grammar, suite runner, report
//! format and the single-shot commands.

pub mod parse;
pub mod verify;

use askey_core::families::{self, CdhParams, ChahnParams, MpParams, WilsonParams};
use askey_core::identities::IdentityId;
use askey_core::props;
use askey_core::quadrature::{corollary_check, CorollaryId, CorollaryInput};
use askey_core::record::VerificationRecord;
use askey_core::sampling::draw_corollary;
use askey_core::C64;

use parse::fmt_sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyName {
    Wilson,
    Cdh,
    Ch,
    Mp,
}

/// Parameters accepted by `eval`; each family reads its own subset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalParams {
    pub a: Option<C64>,
    pub b: Option<C64>,
    pub c: Option<C64>,
    pub d: Option<C64>,
    pub lambda: Option<f64>,
    pub phi: Option<f64>,
}

fn need<T>(v: Option<T>, flag: &str, family: FamilyName) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required for {family:?}").to_lowercase())
}

/// Evaluates one polynomial and formats it with 15 significant digits. The
/// continuous Hahn value is printed as its real and imaginary parts.
pub fn eval_polynomial(family: FamilyName, n: usize, x: f64, p: &EvalParams) -> Result<String, String> {
    let err = |e: askey_core::Error| e.to_string();
    let fam = family;
    Ok(match family {
        FamilyName::Wilson => {
            let q = WilsonParams::new(need(p.a, "a", fam)?, need(p.b, "b", fam)?, need(p.c, "c", fam)?, need(p.d, "d", fam)?)
                .map_err(err)?;
            fmt_sig(families::wilson(n, x, &q).map_err(err)?)
        }
        FamilyName::Cdh => {
            let q = CdhParams::new(need(p.a, "a", fam)?, need(p.b, "b", fam)?, need(p.c, "c", fam)?).map_err(err)?;
            fmt_sig(families::cdh(n, x, &q).map_err(err)?)
        }
        FamilyName::Ch => {
            let q = ChahnParams::new(need(p.a, "a", fam)?, need(p.b, "b", fam)?).map_err(err)?;
            let v = families::chahn(n, x, &q).map_err(err)?;
            format!("{} {}", fmt_sig(v.re), fmt_sig(v.im))
        }
        FamilyName::Mp => {
            let q = MpParams::new(need(p.lambda, "lambda", fam)?, need(p.phi, "phi", fam)?).map_err(err)?;
            fmt_sig(families::mp(n, x, &q).map_err(err)?)
        }
    })
}

/// The catalog printed by `list`.
pub fn catalog() -> String {
    let mut out = format!("identities ({})\n", IdentityId::ALL.len());
    for id in IdentityId::ALL {
        out += &format!("  {:<10} {}\n", id.tag(), id.describe());
    }
    out += &format!("corollaries ({})\n", CorollaryId::ALL.len());
    for id in CorollaryId::ALL {
        out += &format!("  {:<10} {}\n", id.tag(), id.describe());
    }
    out += &format!("properties ({})\n", props::REGISTRY.len());
    for p in props::REGISTRY {
        out += &format!("  {:<28} [{}] {}\n", p.name, p.module, p.describe);
    }
    out
}

/// One corollary check. Parameters come from `input` when given, otherwise
/// from a seeded draw admissible at `rho`.
pub fn integrate_one(
    id: CorollaryId,
    k: usize,
    rho: C64,
    seed: u64,
    trial: usize,
    tol: f64,
    input: Option<CorollaryInput>,
) -> Result<VerificationRecord, String> {
    let inp = match input {
        Some(inp) if inp.id != id => return Err(format!("input is for {}, not {id}", inp.id)),
        Some(inp) => inp,
        None => {
            let base = draw_corollary(id, seed, trial as u64, &[rho]).map_err(|e| e.to_string())?;
            CorollaryInput { k, rho, ..base }
        }
    };
    Ok(corollary_check(&inp, tol, trial))
}
