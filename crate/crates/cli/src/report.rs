use std::io::IsTerminal;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "supergrade";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }

    fn word(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Command {
    pub name: String,
    pub argv: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Envelope shared by every subcommand. `details` is command specific.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub verdict: Verdict,
    pub details: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: Command, verdict: Verdict, details: Value, elapsed: Duration) -> Self {
        Report {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            verdict,
            details,
            timing: Timing {
                elapsed_ms: elapsed.as_secs_f64() * 1000.0,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorMode {
    Auto,
    Never,
}

impl ColorMode {
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("SUPERGRADE_COLOR").as_deref() {
            Err(_) | Ok("") | Ok("auto") => Ok(ColorMode::Auto),
            Ok("never") => Ok(ColorMode::Never),
            Ok(other) => Err(format!("SUPERGRADE_COLOR must be `auto` or `never`, got `{other}`")),
        }
    }

    fn enabled(self) -> bool {
        self == ColorMode::Auto && std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
    }
}

pub fn verdict_line(v: Verdict, color: ColorMode) -> String {
    let word = v.word();
    if !color.enabled() {
        return format!("verdict: {word}");
    }
    let code = match v {
        Verdict::Pass => "32",
        Verdict::Fail => "31",
        Verdict::Error => "33",
    };
    format!("verdict: \x1b[{code}m{word}\x1b[0m")
}
