//! Gnuplot scripts for finished runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::run::{RunKind, MANIFEST_FILE, SWEEP_SUMMARY_FILE};
use crate::error::{Error, Result};

/// The manifest fields needed to locate the outputs.
#[derive(Deserialize)]
struct ManifestView {
    kind: RunKind,
    files: Vec<String>,
    swept: Vec<String>,
    points: Vec<PointView>,
}

#[derive(Deserialize)]
struct PointView {
    dir: PathBuf,
}

const PREAMBLE: &str =
    "set datafile separator ','\nset terminal pngcairo size 1000,700\nset grid\n";

fn require(dir: &Path, file: &str) -> Result<()> {
    let path = dir.join(file);
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::MissingFile(path))
    }
}

fn write_script(dir: &Path, name: &str, body: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, format!("{PREAMBLE}{body}"))?;
    written.push(path);
    Ok(())
}

fn scenario_scripts(dir: &Path, has_sync: bool, written: &mut Vec<PathBuf>) -> Result<()> {
    require(dir, "classical.csv")?;
    write_script(
        dir,
        "mean_values.gp",
        "set output 'mean_values.png'\nset multiplot layout 2,1\nset xlabel 'tau'\n\
         plot 'classical.csv' using 'tau':'q1s' with lines title 'q1s', \\\n     \
         '' using 'tau':'q2s' with lines dashtype 2 title 'q2s'\n\
         plot 'classical.csv' using 'tau':'p1s' with lines title 'p1s', \\\n     \
         '' using 'tau':'p2s' with lines dashtype 2 title 'p2s'\nunset multiplot\n",
        written,
    )?;
    write_script(
        dir,
        "phase_space.gp",
        "set output 'phase_space.png'\nset size ratio -1\nset xlabel 'q'\nset ylabel 'p'\n\
         plot 'classical.csv' using 'q1s':'p1s' with lines title 'resonator 1', \\\n     \
         '' using 'q2s':'p2s' with lines dashtype 2 title 'resonator 2'\n",
        written,
    )?;
    write_script(
        dir,
        "cavity.gp",
        "set output 'cavity.png'\nset multiplot layout 2,1\nset xlabel 'tau'\n\
         plot 'classical.csv' using 'tau':(sqrt(2)*column('re_a1')) with lines title 'x1', \\\n     \
         '' using 'tau':(sqrt(2)*column('re_a2')) with lines dashtype 2 title 'x2'\n\
         plot 'classical.csv' using 'tau':(sqrt(2)*column('im_a1')) with lines title 'y1', \\\n     \
         '' using 'tau':(sqrt(2)*column('im_a2')) with lines dashtype 2 title 'y2'\nunset multiplot\n",
        written,
    )?;
    if has_sync {
        require(dir, "sync.csv")?;
        write_script(
            dir,
            "sync.gp",
            "set output 'sync.png'\nset multiplot layout 3,1\nset xlabel 'tau'\n\
             plot 'sync.csv' using 'tau':'S_c' with lines title 'S_c'\n\
             plot 'sync.csv' using 'tau':'S_phi' with lines title 'S_phi'\n\
             plot 'sync.csv' using 'tau':'S_p' with lines title 'S_p'\nunset multiplot\n",
            written,
        )?;
    }
    Ok(())
}

/// Writes gnuplot scripts next to the outputs named in the manifest at
/// `manifest_path` and returns their paths. Each script renders a PNG when
/// run with gnuplot from its own directory. Runs that diverged still get
/// scripts for the stored prefix.
pub fn emit_plot_scripts(manifest_path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let manifest_path = manifest_path.as_ref();
    let manifest_path = if manifest_path.is_dir() {
        manifest_path.join(MANIFEST_FILE)
    } else {
        manifest_path.to_path_buf()
    };
    let text = fs::read_to_string(&manifest_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(manifest_path.clone()),
        _ => Error::Io(e),
    })?;
    let view: ManifestView = serde_json::from_str(&text)?;
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let mut written = Vec::new();
    match view.kind {
        RunKind::Scenario => {
            scenario_scripts(
                &dir,
                view.files.iter().any(|f| f == "sync.csv"),
                &mut written,
            )?;
        }
        RunKind::Sweep => {
            require(&dir, SWEEP_SUMMARY_FILE)?;
            let x = view.swept.first().map(String::as_str).unwrap_or("chi_c");
            let body = format!(
                "set output 'sweep.png'\nset xlabel '{x}'\nset ylabel 'steady-window mean'\n\
                 plot '{SWEEP_SUMMARY_FILE}' using '{x}':'mean_S_p' with linespoints title 'mean_S_p', \\\n     \
                 '' using '{x}':'mean_S_c' with linespoints title 'mean_S_c', \\\n     \
                 '' using '{x}':'mean_S_phi' with linespoints title 'mean_S_phi'\n"
            );
            write_script(&dir, "sweep.gp", &body, &mut written)?;
            for p in &view.points {
                let pdir = dir.join(&p.dir);
                if pdir.join("classical.csv").is_file() {
                    scenario_scripts(&pdir, pdir.join("sync.csv").is_file(), &mut written)?;
                }
            }
        }
    }
    Ok(written)
}
