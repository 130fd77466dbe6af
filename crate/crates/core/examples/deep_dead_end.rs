//! Builds a strict dead end of depth `k` one level above a base group and
//! checks its certificate.
//!
//! cargo run --release --example deep_dead_end -- [d] [k] [rho]
//!
//! Defaults to d = 2, k = 1, rho = 4 (flows on the square lattice). For the
//! depth-6 element of Sol(2,3) use `3 6 14`.

use std::time::Instant;

use cayleyflows::deadend::{construct_dead_end, strict_depth, verify_certificate, ConstructionOptions};
use cayleyflows::geodesic::exact_length;
use cayleyflows::{GroupSpec, Limits, Parallelism};

fn main() -> cayleyflows::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let d = args.first().copied().unwrap_or(2);
    let k = args.get(1).copied().unwrap_or(1);
    let rho = args.get(2).copied().unwrap_or(4) as u64;
    let spec = GroupSpec::new(2, d)?;

    let start = Instant::now();
    let built = construct_dead_end(spec, k, rho, &ConstructionOptions::default())?;
    println!("built in {:.1?}: {:?}", start.elapsed(), built.stats);
    let cert = &built.certificate;
    let n = &cert.weight;
    let digits = if n.len() > 40 { format!("{}… ({} digits)", &n[..20], n.len()) } else { n.clone() };
    println!("N = {digits}, |g| = N + {}", 2 * k);

    let check = verify_certificate(cert, &built.element, &Limits::default());
    println!("certificate valid: {} {:?}", check.valid, check.failures);
    println!("{}", serde_json::to_string_pretty(cert).unwrap());

    if d == 2 {
        let report = strict_depth(&built.element, k + 1, &exact_length, &Parallelism::sequential())?;
        println!("strict depth by exact lengths: {}", report.strict_depth);
    }
    Ok(())
}
