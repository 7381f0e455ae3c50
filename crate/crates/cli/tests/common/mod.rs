#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn ewvqe(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewvqe"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EWVQE_OUT_DIR")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Value printed after `name` in the `ground` table.
pub fn table_value(out: &str, name: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(name).map(|v| v.trim().parse::<f64>().unwrap()))
        .unwrap_or_else(|| panic!("{name} missing from {out}"))
}
