//! Output directories and input loading.

use std::fs;
use std::path::{Path, PathBuf};

use coverenc::io::{parse_instance, parse_numbers};
use coverenc::npp::NppInstance;
use coverenc::spinglass::SpinGlassInstance;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Directory receiving the files of one run. Files are listed in the order
/// they are written so the manifest can name them.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    /// Creates `root`; a non-empty existing directory is refused unless
    /// `force` is set.
    pub fn create(root: &Path, force: bool) -> CliResult<Self> {
        if root.exists() {
            if !root.is_dir() {
                return Err(CliError::Parameter(format!(
                    "output path {} exists and is not a directory",
                    root.display()
                )));
            }
            let mut entries = fs::read_dir(root).map_err(|e| CliError::io(root, e))?;
            if entries.next().is_some() && !force {
                return Err(CliError::Parameter(format!(
                    "output directory {} is not empty; pass --force to overwrite",
                    root.display()
                )));
            }
        }
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path of `name` inside the directory, recorded as an output.
    pub fn path(&mut self, name: &str) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.path(name)?;
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
    }

    pub fn csv(&mut self, name: &str) -> CliResult<csv::Writer<fs::File>> {
        let path = self.path(name)?;
        csv::Writer::from_path(&path).map_err(CliError::from)
    }

    /// Records a file written by other means, e.g. a nested run.
    pub fn record(&mut self, name: &str) {
        self.written.push(name.to_string());
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_instance(path: &Path) -> CliResult<SpinGlassInstance> {
    parse_instance(&read_text(path)?).map_err(|e| CliError::input(path, e))
}

pub fn load_numbers(path: &Path) -> CliResult<NppInstance> {
    parse_numbers(&read_text(path)?).map_err(|e| CliError::input(path, e))
}

/// `*.json` files of a directory sorted by name, or the path itself if it is
/// a file.
pub fn json_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    if !path.is_dir() {
        if !path.exists() {
            return Err(CliError::Parameter(format!(
                "{} does not exist",
                path.display()
            )));
        }
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .filter(|p| p.file_name().is_some_and(|n| n != "manifest.json"))
        .collect();
    files.sort();
    Ok(files)
}

/// File name without extension, used as a row identifier.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn format_list<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
