//! Free reduction and the word problem in Sol(2,d) for d = 1, 2, 3.
//!
//! cargo run --release --example word_problem -- "a b a^-1 b^-1"

use cayleyflows::{FreeWord, GroupSpec, SolubleElement};

fn main() -> cayleyflows::Result<()> {
    let input = std::env::args().nth(1).unwrap_or_else(|| "abAABBab".into());
    let w = FreeWord::parse(&input, 2)?;
    println!("reduced: {w}  cyclically reduced: {}", w.cyclic_reduce());

    // commutator of commutators: trivial in degree 2, not in degree 3
    let u = FreeWord::parse("abAB", 2)?;
    let v = FreeWord::parse("aabAAB", 2)?;
    let uv = u.concat(&v).concat(&u.inverse()).concat(&v.inverse());
    for d in 1..=3 {
        let spec = GroupSpec::new(2, d)?;
        let x = SolubleElement::from_word(&w, spec)?;
        let y = SolubleElement::from_word(&uv, spec)?;
        println!(
            "Sol(2,{d}): {w} trivial = {}, [[a,b],[a^2,b]] trivial = {}, hash {}",
            x.is_identity(),
            y.is_identity(),
            &x.canonical_hash()[..12]
        );
    }
    Ok(())
}
