//! JSON front end for `polycalc`.

pub mod scenario;
pub mod wire;

pub use scenario::{generate_instance, run_scenario, Report, Scenario, Status};

/// Reads a scenario. A full `{"command", "payload"}` object is accepted as is;
/// anything else is taken as the payload of `command`.
pub fn parse_scenario(command: &str, text: &str) -> Result<Scenario, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let full = match &value {
        serde_json::Value::Object(m) if m.contains_key("command") && m.contains_key("payload") => {
            if command != "run" && m.get("command").and_then(|c| c.as_str()) != Some(command) {
                return Err(format!(
                    "file holds a {} scenario, not {command}",
                    m["command"]
                ));
            }
            value
        }
        _ if command == "run" => {
            return Err("run expects a {\"command\", \"payload\"} object".into())
        }
        _ => serde_json::json!({"command": command, "payload": value}),
    };
    serde_json::from_value(full).map_err(|e| format!("schema violation: {e}"))
}

/// Canonical text of a scenario.
pub fn to_canonical(s: &Scenario) -> String {
    serde_json::to_string_pretty(s).expect("scenarios serialize") + "\n"
}
