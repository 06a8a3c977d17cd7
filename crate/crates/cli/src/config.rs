use crate::{CliResult, Failure};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::Path;

pub fn load(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Failure::validation("config must be a JSON object")),
        Err(e) => Err(Failure::validation(format!(
            "config {} is not valid JSON: {e}",
            path.display()
        ))),
    }
}

/// Worker count: config, then flag or environment, then available cores.
pub fn jobs(flag: Option<usize>, overrides: Option<&Map<String, Value>>) -> CliResult<usize> {
    let from_config = match overrides.and_then(|m| m.get("jobs")) {
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| Failure::validation(format!("jobs must be a positive integer, got {v}")))?
                as usize,
        ),
        None => None,
    };
    let jobs = from_config
        .or(flag)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Failure::validation("jobs must be at least 1"));
    }
    Ok(jobs)
}

/// `args` with the config keys written over it.
pub fn merge<A: Serialize + DeserializeOwned>(
    args: A,
    overrides: Option<Map<String, Value>>,
) -> CliResult<A> {
    let Some(overrides) = overrides else {
        return Ok(args);
    };
    let mut value = serde_json::to_value(&args).expect("arguments serialize");
    let fields = value.as_object_mut().expect("arguments are a record");
    for (key, v) in overrides {
        let key = key.replace('-', "_");
        if key == "jobs" {
            continue;
        }
        if !fields.contains_key(&key) {
            return Err(Failure::validation(format!("unknown config key {key:?}")));
        }
        fields.insert(key, v);
    }
    serde_json::from_value(value).map_err(|e| Failure::validation(format!("invalid config: {e}")))
}
