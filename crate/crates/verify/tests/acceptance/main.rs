//! Acceptance suite. Every criterion prints one PASS/FAIL line to stdout,
//! bypassing the test harness capture so the lines show up in plain `cargo test`.

mod claims;
mod criteria;

use std::io::Write;
use std::sync::Mutex;

// Criteria saturate every core on their own; running them one at a time keeps timings meaningful.
static SERIAL: Mutex<()> = Mutex::new(());

pub fn report_line(pass: bool, label: &str, detail: &str, elapsed: f64) {
    let line = format!("\n{} {label}: {detail} [{elapsed:.1}s]\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

pub fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}
