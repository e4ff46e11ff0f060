//! Runs a verification recipe in-process, as `qclab verify` does, and
//! prints its checks.

use qclab::experiment::{run_recipe, RecipeContext, RECIPES};
use qclab::regularity::DEFAULT_SEED;

fn main() -> qclab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "lemma1-disc".into());
    let n = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(512);
    if !RECIPES.contains(&name.as_str()) {
        eprintln!("recipes: {}", RECIPES.join(", "));
        std::process::exit(2);
    }
    for c in run_recipe(&name, &RecipeContext::new(n, DEFAULT_SEED))? {
        println!(
            "{:<28} {:<5} {:?}",
            c.name,
            if c.passed { "pass" } else { "fail" },
            c.measured
        );
    }
    Ok(())
}
