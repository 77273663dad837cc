//! Bundled data files.
//!
//! The three data files ship inside the crate. Setting `CHANSIM_DATA` to a
//! directory makes every loader read `<dir>/<name>.toml` instead, so edited
//! tables can be used without rebuilding.

use std::borrow::Cow;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Environment variable naming an alternative data directory.
pub const DATA_ROOT_ENV: &str = "CHANSIM_DATA";

pub const SCENARIO_PARAMS: &str = "scenario_params";
pub const ATMOS_MATERIALS: &str = "atmos_materials";
pub const TDL_PROFILES: &str = "tdl_profiles";

const EMBEDDED: [(&str, &str); 3] = [
    (SCENARIO_PARAMS, include_str!("../data/scenario_params.toml")),
    (ATMOS_MATERIALS, include_str!("../data/atmos_materials.toml")),
    (TDL_PROFILES, include_str!("../data/tdl_profiles.toml")),
];

/// Text of the bundled copy of `name`.
pub fn embedded(name: &str) -> Option<&'static str> {
    EMBEDDED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Data directory override, if set.
pub fn data_root() -> Option<PathBuf> {
    std::env::var_os(DATA_ROOT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Load `name` from the override directory when set, else the bundled copy.
pub fn load(name: &str) -> Result<Cow<'static, str>> {
    match data_root() {
        Some(root) => load_from(&root, name).map(Cow::Owned),
        None => embedded(name)
            .map(Cow::Borrowed)
            .ok_or_else(|| data_error(name, "no such bundled data file")),
    }
}

pub fn load_from(root: &Path, name: &str) -> Result<String> {
    let path = root.join(format!("{name}.toml"));
    std::fs::read_to_string(&path).map_err(|e| data_error(name, format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn data_error(name: &str, message: impl Into<String>) -> Error {
    Error::Data {
        name: name.to_string(),
        message: message.into(),
    }
}

pub(crate) fn parse_toml<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| data_error(name, e.to_string()))
}
