//! Ball sizes of Sol(2,2), self-avoiding walk counts, and n-th roots.
//!
//! cargo run --release --example growth -- 8 14 [cache-dir]

use cayleyflows::growth::{
    ball_sizes, rate_estimates, saw_counts, saw_injects_into_group, BallCache, GrowthSeries, SAW_RATE_REFERENCE,
};
use cayleyflows::{GroupSpec, Limits, Parallelism};

fn main() -> cayleyflows::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let radius: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let saw_len: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(14);
    let cache = args.get(3).map(BallCache::new).transpose()?;
    let par = Parallelism::with_threads(0);

    let balls = ball_sizes(GroupSpec::new(2, 2)?, radius, &Limits::default(), &par, cache.as_ref())?;
    print!("{}", balls.to_csv());

    let saws = GrowthSeries::saw(saw_counts(saw_len, &par)?);
    print!("{}", saws.to_csv());
    if let Some((n, r)) = rate_estimates(&saws).last() {
        println!("c_{n}^(1/{n}) = {r:.5}, published connective constant {SAW_RATE_REFERENCE}");
    }

    // distinct self-avoiding walks stay distinct in the group, so b_n >= c_n
    let n = 8.min(saw_len);
    let (distinct, count) = saw_injects_into_group(n)?;
    println!("{count} walks of length {n} pairwise distinct in Sol(2,2): {distinct}");
    Ok(())
}
