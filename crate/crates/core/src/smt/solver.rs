//! External solver processes, with a timeout, a result cache and a bound on
//! concurrent processes.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use super::{SolverVerdict, UnknownReason};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Program and arguments; the script is written to its stdin.
    pub command: Vec<String>,
    pub timeout: Duration,
}

pub const DEFAULT_SOLVER: &str = "z3 -in";

impl SolverConfig {
    pub fn from_command_line(cmd: &str, timeout: Duration) -> Self {
        SolverConfig { command: cmd.split_whitespace().map(str::to_string).collect(), timeout }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::from_command_line(DEFAULT_SOLVER, Duration::from_secs(5))
    }
}

/// Maps solver output to a verdict. Only a literal `unsat` yields `Valid`.
pub fn parse_answer(stdout: &str) -> SolverVerdict {
    let first = stdout.lines().map(str::trim).find(|l| !l.is_empty());
    match first {
        Some("unsat") => SolverVerdict::Valid,
        Some("sat") => SolverVerdict::Invalid,
        Some("unknown") => SolverVerdict::Unknown(UnknownReason::SolverUnknown),
        Some(other) => SolverVerdict::Unknown(UnknownReason::ProcessError(format!(
            "malformed solver output: {}",
            other.chars().take(200).collect::<String>()
        ))),
        None => SolverVerdict::Unknown(UnknownReason::ProcessError("no solver output".into())),
    }
}

/// Runs one query in a fresh solver process.
pub fn check_validity(script: &str, cfg: &SolverConfig) -> SolverVerdict {
    let Some((prog, args)) = cfg.command.split_first() else {
        return SolverVerdict::Unknown(UnknownReason::ProcessError("empty solver command".into()));
    };
    let mut child = match Command::new(prog)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => {
            return SolverVerdict::Unknown(UnknownReason::ProcessError(format!("cannot spawn `{prog}`: {e}")));
        }
    };
    let mut stdin = child.stdin.take().expect("piped stdin");
    let mut stdout = child.stdout.take().expect("piped stdout");
    let script = script.to_string();
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(script.as_bytes());
    });
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut s = String::new();
        let r = stdout.read_to_string(&mut s).map(|_| s);
        let _ = tx.send(r);
    });
    let verdict = match rx.recv_timeout(cfg.timeout) {
        Ok(Ok(out)) => parse_answer(&out),
        Ok(Err(e)) => SolverVerdict::Unknown(UnknownReason::ProcessError(e.to_string())),
        Err(_) => {
            let _ = child.kill();
            SolverVerdict::Unknown(UnknownReason::Timeout)
        }
    };
    let _ = child.wait();
    let _ = writer.join();
    verdict
}

/// A solver front with a per-script cache and at most `jobs` processes
/// running at once.
pub struct Solver {
    pub config: SolverConfig,
    jobs: usize,
    running: Mutex<usize>,
    freed: Condvar,
    cache: Mutex<HashMap<String, SolverVerdict>>,
}

impl Solver {
    pub fn new(config: SolverConfig, jobs: usize) -> Self {
        Solver {
            config,
            jobs: jobs.max(1),
            running: Mutex::new(0),
            freed: Condvar::new(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn check(&self, script: &str) -> SolverVerdict {
        if let Some(v) = self.cache.lock().expect("cache lock").get(script) {
            return v.clone();
        }
        {
            let mut n = self.running.lock().expect("pool lock");
            while *n >= self.jobs {
                n = self.freed.wait(n).expect("pool lock");
            }
            *n += 1;
        }
        let v = check_validity(script, &self.config);
        *self.running.lock().expect("pool lock") -= 1;
        self.freed.notify_one();
        self.cache.lock().expect("cache lock").insert(script.to_string(), v.clone());
        v
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default(), num_jobs())
    }
}

pub fn num_jobs() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
