//! The bundled programs.

use thiserror::Error;

use crate::text::{parse_program, ProgramSource};

pub const BUNDLED_NAMES: [&str; 8] = [
    "transitive-closure",
    "is-cycle-slow",
    "is-cycle",
    "is-tree",
    "is-bin-dag",
    "is-connected",
    "2-colour",
    "top-sort",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown program `{0}`")]
pub struct UnknownProgram(pub String);

/// Source text of a bundled program.
pub fn bundled_source(name: &str) -> Result<&'static str, UnknownProgram> {
    Ok(match name {
        "transitive-closure" => include_str!("../programs/transitive-closure.gp"),
        "is-cycle-slow" => include_str!("../programs/is-cycle-slow.gp"),
        "is-cycle" => include_str!("../programs/is-cycle.gp"),
        "is-tree" => include_str!("../programs/is-tree.gp"),
        "is-bin-dag" => include_str!("../programs/is-bin-dag.gp"),
        "is-connected" => include_str!("../programs/is-connected.gp"),
        "2-colour" => include_str!("../programs/2-colour.gp"),
        "top-sort" => include_str!("../programs/top-sort.gp"),
        _ => return Err(UnknownProgram(name.to_string())),
    })
}

/// Parsed bundled program. The sources are tested to parse, so only the name
/// can be wrong.
pub fn bundled_program(name: &str) -> Result<ProgramSource, UnknownProgram> {
    let src = bundled_source(name)?;
    Ok(parse_program(src).unwrap_or_else(|e| panic!("bundled program {name}: {e}")))
}
