//! End-to-end runs of the `fracadi` binary: config parsing, flag overrides,
//! every subcommand, output files, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fracadi(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracadi"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracadi-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_reports_error_and_writes_csv() {
    let dir = tmpdir("solve");
    std::fs::write(
        dir.join("run.cfg"),
        "problem = p1d\nscheme = cn-full\nalpha = 1.5\nn = 20\nnt_ratio = 1\noutput = out.csv\n",
    )
    .unwrap();
    let out = fracadi(&["solve", "--config", "run.cfg"], &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("out.csv")).unwrap();
    assert!(csv.starts_with("level,delta,tau,error,rate\n"));
    // dx = tau = 1/20, error frozen from the published table (2.6284e-4)
    let err: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((err - 2.6284e-4).abs() / 2.6284e-4 < 0.02, "error {err:e}");
}

#[test]
fn convergence_grouped_sections_csv() {
    let dir = tmpdir("conv");
    std::fs::write(
        dir.join("t2.cfg"),
        "problem = p1d\nscheme = cn-full\nn = 10\nlevels = 3\n\n[a11]\nalpha = 1.1\n\n[a15]\nalpha = 1.5\n",
    )
    .unwrap();
    let out = fracadi(&["convergence", "--config", "t2.cfg"], &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    let header = stdout.lines().next().unwrap();
    assert!(header.contains("error[a11 1.1]") && header.contains("error[a15 1.5]"));
    assert_eq!(stdout.lines().count(), 4); // header + 3 levels
}

#[test]
fn convergence_levels_flag_overrides_config() {
    let dir = tmpdir("levels");
    std::fs::write(
        dir.join("c.cfg"),
        "problem = p1d\nscheme = cn-full\nalpha = 1.9\nn = 10\nlevels = 4\n",
    )
    .unwrap();
    let out = fracadi(&["convergence", "--config", "c.cfg", "--levels", "2"], &dir);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 3); // header + 2 levels
}

#[test]
fn flag_overrides_config_key() {
    let dir = tmpdir("override");
    std::fs::write(
        dir.join("c.cfg"),
        "problem = p1d\nscheme = cn-full\nalpha = 1.5\nn = 10\n",
    )
    .unwrap();
    let out = fracadi(&["solve", "--config", "c.cfg", "--n", "20"], &dir);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("n=20"), "stderr: {stderr}");
}

#[test]
fn unknown_key_fails_with_nonzero_exit() {
    let dir = tmpdir("badkey");
    std::fs::write(
        dir.join("c.cfg"),
        "problem = p1d\nscheme = cn-full\nalpha = 1.5\nn = 10\nwhat = 1\n",
    )
    .unwrap();
    let out = fracadi(&["solve", "--config", "c.cfg"], &dir);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn inadmissible_scheme_fails_at_parse() {
    let dir = tmpdir("inadmissible");
    std::fs::write(
        dir.join("c.cfg"),
        "problem = p2d\nscheme = fs-ii\nalpha = 1.5\nbeta = 1.4\nn = 10\n",
    )
    .unwrap();
    let out = fracadi(&["solve", "--config", "c.cfg"], &dir);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not admissible"));
}

#[test]
fn compare_splitting_small_grid_markdown() {
    let dir = tmpdir("split");
    // the forcing oracle needs the benchmark mesh to pass its Richardson
    // gate; coarser meshes are refused (exercised below)
    std::fs::write(
        dir.join("s.cfg"),
        "problem = riesz2d\nscheme = d-adi\nalpha = 1.9\nbeta = 1.9\nn = 100\nformat = markdown\n",
    )
    .unwrap();
    let out = fracadi(&["compare-splitting", "--config", "s.cfg"], &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("| d-adi |") || stdout.contains("| d-adi "));
    assert!(stdout.contains("fs-ii") && stdout.contains("d-adi-ii"));
    assert!(stdout.contains("tau/dx=10") && stdout.contains("tau/dx=2.5"));
}

#[test]
fn riesz_mesh_too_coarse_for_the_oracle_is_refused() {
    let dir = tmpdir("coarse");
    std::fs::write(
        dir.join("s.cfg"),
        "problem = riesz2d\nscheme = d-adi\nalpha = 1.9\nbeta = 1.9\nn = 20\n",
    )
    .unwrap();
    let out = fracadi(&["solve", "--config", "s.cfg"], &dir);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("forcing oracle refused"));
}

#[test]
fn stability_report_prints_blocks_and_passes() {
    let dir = tmpdir("stab");
    let out = fracadi(
        &["stability-report", "--mu", "1.1,1.9", "--sizes", "4,8"],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.matches("pass = true").count() >= 12); // 2 mu x 2 q x 3 blocks
    assert!(stdout.contains("lambda_max_h"));
    assert!(stdout.contains("inv_norm"));
}
