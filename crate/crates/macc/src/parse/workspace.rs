//! Workspace loading: walks model directories, parses every recognized
//! source file, and aggregates the results.
//!
//! All `.arc` and `.cd` files under the given directories form one model
//! with a single type namespace. Directories are processed in the order
//! given; files within one directory tree load in lexicographic path order,
//! which fixes declaration order for every downstream pass. Files a parser
//! rejects are reported and skipped; loading continues so one bad file does
//! not hide diagnostics in the others. Other file extensions (scenario
//! JSON, table payloads) are ignored.
//!
//! Library manifests (`.lib`) load through a separate entry point because
//! they live on the library path, not in the model workspace.

use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::diag::Diagnostic;
use crate::model::{ArchitectureModel, CodeLibraryManifest, SourcedComponent, SourcedDiagram};
use crate::parse::grammar::{parse_architecture, parse_class_diagram, parse_library};
use crate::parse::{SourceKind, SourceUnit};

#[derive(Debug, thiserror::Error)]
#[error("cannot read '{path}': {source}")]
pub struct WorkspaceIoError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Default)]
pub struct Workspace {
    pub model: ArchitectureModel,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Default)]
pub struct Libraries {
    pub manifests: Vec<CodeLibraryManifest>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Collects files under `dir` whose extension maps to a source kind in
/// `wanted`, sorted by path.
fn collect_sources(
    dir: &Path,
    wanted: &[SourceKind],
) -> Result<Vec<(PathBuf, SourceKind)>, WorkspaceIoError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(dir) {
        let entry = entry.map_err(|e| WorkspaceIoError {
            path: dir.display().to_string(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("walk failed")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.into_path();
        let Some(kind) = path
            .extension()
            .and_then(|e| e.to_str())
            .and_then(SourceKind::from_extension)
        else {
            continue;
        };
        if wanted.contains(&kind) {
            files.push((path, kind));
        }
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(files)
}

fn read_unit(path: &Path, kind: SourceKind) -> Result<SourceUnit, WorkspaceIoError> {
    let text = std::fs::read_to_string(path).map_err(|e| WorkspaceIoError {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(SourceUnit {
        path: path.display().to_string(),
        kind,
        text,
    })
}

/// Loads every architecture and class diagram file under the given
/// directories into one model.
pub fn load_workspace(dirs: &[PathBuf]) -> Result<Workspace, WorkspaceIoError> {
    let mut ws = Workspace::default();
    for dir in dirs {
        for (path, kind) in
            collect_sources(dir, &[SourceKind::Architecture, SourceKind::ClassDiagram])?
        {
            let unit = read_unit(&path, kind)?;
            match kind {
                SourceKind::Architecture => match parse_architecture(&unit) {
                    Ok(component) => ws.model.components.push(SourcedComponent {
                        file: unit.path,
                        component,
                    }),
                    Err(e) => ws.diagnostics.push(e.to_diagnostic(&unit.path)),
                },
                SourceKind::ClassDiagram => match parse_class_diagram(&unit) {
                    Ok(diagram) => ws.model.diagrams.push(SourcedDiagram {
                        file: unit.path,
                        diagram,
                    }),
                    Err(e) => ws.diagnostics.push(e.to_diagnostic(&unit.path)),
                },
                _ => unreachable!(),
            }
        }
    }
    Ok(ws)
}

/// Loads every library manifest under the given directories.
pub fn load_libraries(dirs: &[PathBuf]) -> Result<Libraries, WorkspaceIoError> {
    let mut libs = Libraries::default();
    for dir in dirs {
        for (path, _) in collect_sources(dir, &[SourceKind::LibraryManifest])? {
            let unit = read_unit(&path, SourceKind::LibraryManifest)?;
            match parse_library(&unit) {
                Ok(mut manifest) => {
                    manifest.source_dir = path.parent().map(Path::to_path_buf);
                    if let Some(existing) = libs.manifests.iter().find(|m| m.name == manifest.name)
                    {
                        libs.diagnostics.push(Diagnostic::error(
                            "DUPIMPL",
                            &unit.path,
                            manifest.name_loc,
                            format!(
                                "library '{}' is already loaded (its name collides with another manifest); first declaration wins",
                                existing.name
                            ),
                        ));
                    } else {
                        libs.manifests.push(manifest);
                    }
                }
                Err(e) => libs.diagnostics.push(e.to_diagnostic(&unit.path)),
            }
        }
    }
    Ok(libs)
}

/// Reads and parses one application configuration file.
pub fn load_application(
    path: &Path,
) -> Result<Result<crate::model::ApplicationConfiguration, Diagnostic>, WorkspaceIoError> {
    let unit = read_unit(path, SourceKind::AppConfig)?;
    match crate::parse::grammar::parse_application(&unit) {
        Ok(app) => Ok(Ok(app)),
        Err(e) => Ok(Err(e.to_diagnostic(&unit.path))),
    }
}
