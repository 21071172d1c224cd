//! Writes the synthetic fixture corpus.
//!
//! ```text
//! cargo run -p dysintel-core --example make_fixture -- fixtures/corpus
//! ```

use std::path::PathBuf;

use dysintel::synthetic::{generate, SyntheticConfig};

fn main() -> dysintel::Result<()> {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "fixtures/corpus".into());
    let corpus = generate(&SyntheticConfig::fixture())?;
    let manifest = corpus.write_dir(&dir)?;
    println!("{}", manifest.display());
    Ok(())
}
