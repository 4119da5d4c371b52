#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use chrono::{DateTime, TimeZone, Utc};
use dnl::{AppState, LabelStore};
use tokio::task::JoinHandle;

pub const PROFILE_CSV: &str = "a,b\n1,\n2,x\n3,\n4,y\n";

pub fn fixed_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 11, 2, 0, 0, 0).unwrap()
}

pub const FIXED_TIME_ARG: &str = "2020-11-02T00:00:00Z";

pub struct TestServer {
    pub base: String,
    pub state: Arc<AppState>,
    handle: JoinHandle<std::io::Result<()>>,
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.handle.abort();
    }
}

/// Serves `store_dir` on an ephemeral port with a fixed clock.
pub async fn start(store_dir: &Path) -> TestServer {
    let store = LabelStore::open(store_dir).expect("store opens");
    let at = fixed_time();
    let state = Arc::new(AppState {
        store,
        clock: Arc::new(move || at),
    });
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let handle = tokio::spawn(dnl::serve_on(listener, Arc::clone(&state), std::future::pending()));
    TestServer { base, state, handle }
}

/// Copies the two fixture labels into `dir`.
pub fn seed_store(dir: &Path) {
    for name in ["covid.label.json", "evictions.label.json"] {
        std::fs::copy(dnl_testkit::fixture(name), dir.join(name)).unwrap();
    }
}

pub fn dnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnl"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("dnl runs")
}

pub fn fixture_arg(rel: &str) -> String {
    dnl_testkit::fixture(rel).to_string_lossy().into_owned()
}
