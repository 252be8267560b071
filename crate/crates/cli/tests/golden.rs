//! Regression guard: fresh CLI outputs are hashed and compared against the
//! committed images in `tests/golden`. Run with `CHUNKSTYLE_BLESS=1` to
//! rewrite them after an intended behavior change.

use std::path::{Path, PathBuf};
use std::process::Command;

use chunkstyle_cli::png_io::read_u8;
use sha2::{Digest, Sha256};

fn asset(name: &str) -> String {
    format!("{}/assets/{name}.png", env!("CARGO_MANIFEST_DIR"))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

/// Hash of the decoded pixels, so PNG encoder changes do not matter.
fn pixel_hash(path: &Path) -> String {
    let r = read_u8(path).unwrap();
    let mut h = Sha256::new();
    h.update([r.channels() as u8]);
    h.update((r.width() as u32).to_le_bytes());
    h.update((r.height() as u32).to_le_bytes());
    h.update(r.data());
    format!("{:x}", h.finalize())
}

fn check(name: &str, args: &[String]) {
    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("out.png");
    let out = Command::new(env!("CARGO_BIN_EXE_chunkstyle"))
        .arg("blit")
        .args(args)
        .arg("--out")
        .arg(&fresh)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{name}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let golden = golden_dir().join(format!("{name}.png"));
    if std::env::var_os("CHUNKSTYLE_BLESS").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::copy(&fresh, &golden).unwrap();
    }
    assert_eq!(
        pixel_hash(&fresh),
        pixel_hash(&golden),
        "{name} drifted from {}",
        golden.display()
    );
}

fn guides(kind: &str, source: &str, target: &str) -> Vec<String> {
    vec![
        "--source-guide".into(),
        format!("{kind}={}", asset(source)),
        "--target-guide".into(),
        format!("{kind}={}", asset(target)),
    ]
}

#[test]
fn sphere_to_torus_vote() {
    let mut args = vec!["--style".into(), asset("sphere_style")];
    args.extend(guides("normal", "sphere_normals", "torus_normals"));
    check("torus_vote", &args);
}

#[test]
fn sphere_to_blob_blit_coarse() {
    let mut args = vec!["--style".into(), asset("sphere_style")];
    args.extend(guides("normal", "sphere_normals", "blob_normals"));
    args.extend(["--resolve", "blit", "--threshold", "0.3", "--seed", "7"].map(String::from));
    check("blob_blit", &args);
}

#[test]
fn warped_texture_coordinates() {
    let mut args = vec!["--style".into(), asset("uv_style")];
    args.extend(guides("uv", "uv_source", "uv_target"));
    args.extend(["--threshold", "0.05"].map(String::from));
    check("uv_vote", &args);
}

#[test]
fn face_with_three_guides() {
    let mut args = vec!["--style".into(), asset("face_style")];
    args.extend(guides(
        "displacement",
        "face_source_disp",
        "face_target_disp",
    ));
    args.extend(guides("segmentation", "face_source_seg", "face_target_seg"));
    args.extend(guides("appearance", "face_source_app", "face_target_app"));
    args.extend(["--weight", "appearance=0.5"].map(String::from));
    check("face_vote", &args);
}
