//! Multi-method homology runs.
//!
//! Every method yields unreduced homology; the report converts to reduced
//! homology on request. Over a field the profile carries Betti numbers as
//! free ranks.

use std::time::Instant;

use serde::Serialize;

use crate::equivariant::{hemispherical, plus_part, tensor, StructuredZ2Complex};
use crate::error::{Error, Result};
use crate::formulas::{freepart_formula, homology_formula, Coefficients};
use crate::homology::{homology_field, homology_z, ChainComplex, Group, HomologyProfile};
use crate::morse::{morse_reduce, standard_splitting};
use crate::tree::build_complex_with_cap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Simplicial,
    Cellular,
    Morse,
    Formula,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Simplicial, Method::Cellular, Method::Morse, Method::Formula];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simplicial" => Ok(Method::Simplicial),
            "cellular" => Ok(Method::Cellular),
            "morse" => Ok(Method::Morse),
            "formula" => Ok(Method::Formula),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }

    /// Comma-separated list; `all` selects every method.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Method::ALL.to_vec());
        }
        let mut out: Vec<Method> = Vec::new();
        for part in s.split(',') {
            let m = Method::parse(part)?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("no methods given".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Inputs {
    pub d: usize,
    pub n: usize,
    pub methods: Vec<Method>,
    pub coefficients: String,
    pub reduced: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodResult {
    pub method: Method,
    pub homology: HomologyProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub inputs: Inputs,
    pub results: Vec<MethodResult>,
    pub agree: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn betti_profile(b: &[usize]) -> HomologyProfile {
    HomologyProfile::new(b.iter().map(|&free| Group { free, torsion: Vec::new() }).collect())
}

fn complex_homology(c: &ChainComplex, coeff: Coefficients) -> Result<HomologyProfile> {
    match coeff {
        Coefficients::Integers => homology_z(c, false),
        Coefficients::Field(p) => Ok(betti_profile(&homology_field(c, p, false)?)),
    }
}

/// `(V ⊗ W)^+` for hemispherical `V`, `W` of degrees `d - 2`, `n - 2`.
pub fn cellular_complex(d: usize, n: usize) -> Result<ChainComplex> {
    check_dims(d, n)?;
    plus_part(&tensor(&hemispherical(d - 2), &hemispherical(n - 2)))
}

/// The Morse-reduced complex, using the larger sphere as `V` so that the
/// support condition holds.
pub fn morse_complex(d: usize, n: usize) -> Result<ChainComplex> {
    check_dims(d, n)?;
    let (big, small) = (d.max(n) - 2, d.min(n) - 2);
    let (pt, s) = standard_splitting(big, &StructuredZ2Complex::hemispherical(small))?;
    Ok(morse_reduce(pt.complex(), &s)?.complex)
}

fn check_dims(d: usize, n: usize) -> Result<()> {
    if d < 3 || n < 3 {
        return Err(Error::Domain(format!("need d, n >= 3, got d={d}, n={n}")));
    }
    Ok(())
}

/// Unreduced homology of `B(d,n)` by one method.
pub fn run_method(method: Method, d: usize, n: usize, coeff: Coefficients, cap: u128) -> Result<HomologyProfile> {
    check_dims(d, n)?;
    match method {
        Method::Simplicial => {
            let q = build_complex_with_cap(d, n, cap)?;
            complex_homology(&q.chain_complex()?, coeff)
        }
        Method::Cellular => complex_homology(&cellular_complex(d, n)?, coeff),
        Method::Morse => complex_homology(&morse_complex(d, n)?, coeff),
        Method::Formula => {
            let integral = homology_formula(d, n)?.profile.to_unreduced();
            match coeff {
                Coefficients::Integers => Ok(integral),
                Coefficients::Field(2) => Ok(betti_profile(&integral.betti_numbers(2))),
                Coefficients::Field(p) => Ok(freepart_formula(d, n, p)?.profile.to_unreduced()),
            }
        }
    }
}

/// Runs every requested method and compares the results.
pub fn run_homology(
    d: usize,
    n: usize,
    methods: &[Method],
    coeff: Coefficients,
    reduced: bool,
    cap: u128,
    timings: bool,
) -> Result<RunReport> {
    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let mut homology = run_method(method, d, n, coeff, cap)?;
        if reduced {
            homology = homology.to_reduced()?;
        }
        let millis = timings.then(|| start.elapsed().as_millis());
        results.push(MethodResult { method, homology, millis });
    }
    let agree = results.windows(2).all(|w| w[0].homology == w[1].homology);
    Ok(RunReport {
        command: "homology",
        inputs: Inputs { d, n, methods: methods.to_vec(), coefficients: coeff.to_string(), reduced },
        results,
        agree,
    })
}
