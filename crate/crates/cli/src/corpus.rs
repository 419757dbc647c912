//! The `cluster` command: manifest loading, ingestion and reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use zeus_core::cluster::{cluster, ClusterConfig, Submission, Unprocessed};
use zeus_core::frontend::{load, merge_envs};
use zeus_core::par::Execution;
use zeus_core::smt::num_jobs;
use zeus_core::syntax::DataEnv;

use super::{instantiation, ClusterArgs};

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Manifest {
    /// Submission directory, relative to the manifest.
    directory: Option<PathBuf>,
    entry: Option<String>,
    /// File extension of submissions, without the dot.
    extension: Option<String>,
    #[serde(default)]
    instantiate: BTreeMap<String, String>,
}

struct Resolved {
    directory: PathBuf,
    entry: String,
    extension: String,
    instantiate: Vec<String>,
}

fn resolve(args: &ClusterArgs) -> Result<Resolved, String> {
    let (manifest, base) = if args.input.is_dir() {
        (Manifest::default(), args.input.clone())
    } else {
        let text = std::fs::read_to_string(&args.input).map_err(|e| format!("{}: {e}", args.input.display()))?;
        let m: Manifest = toml::from_str(&text).map_err(|e| format!("{}: {e}", args.input.display()))?;
        let dir = args.input.parent().unwrap_or(Path::new(".")).to_path_buf();
        let sub = m.directory.clone().unwrap_or_else(|| PathBuf::from("."));
        (m, dir.join(sub))
    };
    let entry =
        args.entry.clone().or(manifest.entry).ok_or("no entry binding: pass --entry or set `entry` in the manifest")?;
    let mut instantiate: Vec<String> = manifest.instantiate.iter().map(|(k, v)| format!("{k}={v}")).collect();
    instantiate.extend(args.common.instantiate.iter().cloned());
    Ok(Resolved { directory: base, entry, extension: manifest.extension.unwrap_or_else(|| "sml".into()), instantiate })
}

fn submission_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, String> {
    let rd = std::fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(Result::ok)
        .map(|d| d.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == ext))
        .collect();
    files.sort();
    Ok(files)
}

pub(super) fn run(args: ClusterArgs) -> Result<(), String> {
    let r = resolve(&args)?;
    let inst = instantiation(&r.instantiate)?;
    let mut corpus = Vec::new();
    let mut unprocessed = Vec::new();
    let mut env = DataEnv::new();
    for path in submission_files(&r.directory, &r.extension)? {
        let id = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let src = match std::fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) => {
                unprocessed.push(Unprocessed { id, error: e.to_string() });
                continue;
            }
        };
        let t = match load(&src, &r.entry, &inst) {
            Ok(t) => t,
            Err(e) => {
                unprocessed.push(Unprocessed { id: id.clone(), error: e.render(&id, &src) });
                continue;
            }
        };
        match merge_envs(&env, &t.env) {
            Ok(merged) => env = merged,
            Err(e) => {
                unprocessed.push(Unprocessed { id, error: e.to_string() });
                continue;
            }
        }
        corpus.push(Submission { id, expr: t.expr, ty: t.ty });
    }

    let jobs = args.jobs.unwrap_or_else(num_jobs).max(1);
    let cfg = ClusterConfig {
        gen: args.common.gen(),
        negative_caching: args.negative_caching,
        execution: if jobs > 1 { Execution::Parallel } else { Execution::Sequential },
        batch: jobs,
    };
    let report = cluster(&corpus, unprocessed, &env, &args.common.solver(jobs), &cfg);

    std::fs::create_dir_all(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let json = args.out.join("report.json");
    let text = args.out.join("report.txt");
    std::fs::write(&json, report.to_json()).map_err(|e| format!("{}: {e}", json.display()))?;
    std::fs::write(&text, report.to_text()).map_err(|e| format!("{}: {e}", text.display()))?;
    println!(
        "{} submissions, {} classes, {} unprocessed, {} comparisons",
        report.stats.submissions,
        report.classes.len(),
        report.unprocessed.len(),
        report.comparisons_performed
    );
    println!("wrote {} and {}", json.display(), text.display());
    Ok(())
}
