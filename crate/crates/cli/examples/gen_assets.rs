//! Regenerates the bundled PNG assets.
//!
//! `cargo run -p chunkstyle-cli --example gen_assets [DIR]`

use std::path::PathBuf;

use chunkstyle::assets::bundled;
use chunkstyle_cli::png_io::write_u8;

/// Size and frame count of the committed asset set.
pub const SIZE: usize = 256;
pub const FRAMES: usize = 10;

fn main() {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets"));
    for asset in bundled(SIZE, FRAMES) {
        let path = dir.join(format!("{}.png", asset.name));
        if let Err(e) = write_u8(&asset.raster, &path) {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
        println!("{}", path.display());
    }
}
