//! Scenario configuration: a sectioned plain-text key/value format.
//!
//! ```text
//! [gfc]
//! h_s = 10.0
//! zeta = 0.4
//! r_droop_pu = 0.0
//! r_v_pu = 0.03
//! x_v_pu = 0.3
//! i_lim_pu = 1.1
//! e_pu = 1.0
//! p_set_pu = 0.8
//! feedback = measured
//!
//! [network]
//! x_tf_pu = 0.1
//! x_g_pu = 0.1
//! vg_pu = 1.0
//! f_nominal_hz = 50.0
//!
//! [events]
//! rocof t=1.0 rate=-1.0 f_end=48.0
//! phase_jump t=1.0 deg=40.0
//! voltage_dip t=1.0 dur=0.3 v=0.5
//! setpoint_step t=1.0 p=0.9
//!
//! [sim]
//! t_end_s = 10.0
//! dt_s = 0.001
//! record_every = 1
//! ```
//!
//! Every key is optional; missing keys fall back to the defaults above
//! (the study-case parameter set). Angles are degrees in files and on the
//! command line, radians inside the library. `phase_jump deg=` is the
//! grid phase advance: positive values drop the rotor angle and stress
//! the synchronization loop.

use crate::defaults;
use crate::error::{Error, Result};
use crate::scenario::Event;
use crate::types::{FeedbackMode, GfcParams, NetworkParams};
use std::path::Path;

/// `[sim]` section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSection {
    pub t_end_s: f64,
    pub dt_s: f64,
    pub record_every: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            t_end_s: 10.0,
            dt_s: 1e-3,
            record_every: 1,
        }
    }
}

/// A fully resolved scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub gfc: GfcParams,
    pub network: NetworkParams,
    pub f_nominal_hz: f64,
    pub events: Vec<Event>,
    pub sim: SimSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            gfc: defaults::gfc_params(),
            network: defaults::network_params(),
            f_nominal_hz: defaults::F_NOMINAL_HZ,
            events: Vec::new(),
            sim: SimSection::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| Error::ConfigParse {
                    line: line_no,
                    msg: format!("unterminated section header `{line}`"),
                })?;
                section = name.trim().to_string();
                match section.as_str() {
                    "gfc" | "network" | "events" | "sim" => {}
                    other => {
                        return Err(Error::ConfigParse {
                            line: line_no,
                            msg: format!("unknown section `[{other}]`"),
                        })
                    }
                }
                continue;
            }
            match section.as_str() {
                "events" => cfg.events.push(parse_event_line(line, line_no)?),
                "gfc" | "network" | "sim" => {
                    let (key, value) = split_key_value(line, line_no)?;
                    cfg.set_scalar(&section, key, value, line_no)?;
                }
                "" => {
                    return Err(Error::ConfigParse {
                        line: line_no,
                        msg: format!("`{line}` appears before any [section] header"),
                    })
                }
                _ => unreachable!(),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply one `section.key=value` override (events are not overridable).
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (path, value) = assignment.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!(
                "override `{assignment}` is not of the form section.key=value"
            ))
        })?;
        let (section, key) = path.trim().split_once('.').ok_or_else(|| {
            Error::InvalidParameter(format!(
                "override key `{path}` is not of the form section.key"
            ))
        })?;
        self.set_scalar(section.trim(), key.trim(), value.trim(), 0)
            .map_err(|e| match e {
                Error::ConfigParse { msg, .. } => {
                    Error::InvalidParameter(format!("override `{assignment}`: {msg}"))
                }
                other => other,
            })?;
        self.validate()
    }

    fn set_scalar(&mut self, section: &str, key: &str, value: &str, line: usize) -> Result<()> {
        let bad_key = || Error::ConfigParse {
            line,
            msg: format!("unknown key `{key}` in section [{section}]"),
        };
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::ConfigParse {
                line,
                msg: format!("`{v}` is not a number (key `{key}`)"),
            })
        };
        match section {
            "gfc" => match key {
                "h_s" => self.gfc.h_inertia = num(value)?,
                "zeta" => self.gfc.zeta = num(value)?,
                "r_droop_pu" => self.gfc.r_droop = num(value)?,
                "r_v_pu" => self.gfc.r_v = num(value)?,
                "x_v_pu" => self.gfc.x_v = num(value)?,
                "i_lim_pu" => self.gfc.i_lim = num(value)?,
                "e_pu" => self.gfc.e_mag = num(value)?,
                "p_set_pu" => self.gfc.p_set = num(value)?,
                "feedback" => {
                    self.gfc.feedback_mode = match value {
                        "measured" => FeedbackMode::MeasuredPower,
                        "virtual" => FeedbackMode::VirtualPower,
                        other => {
                            return Err(Error::ConfigParse {
                                line,
                                msg: format!(
                                    "feedback must be `measured` or `virtual`, got `{other}`"
                                ),
                            })
                        }
                    }
                }
                _ => return Err(bad_key()),
            },
            "network" => match key {
                "x_tf_pu" => self.network.x_tf = num(value)?,
                "x_g_pu" => self.network.x_g = num(value)?,
                "vg_pu" => self.network.vg_nominal = num(value)?,
                "f_nominal_hz" => self.f_nominal_hz = num(value)?,
                _ => return Err(bad_key()),
            },
            "sim" => match key {
                "t_end_s" => self.sim.t_end_s = num(value)?,
                "dt_s" => self.sim.dt_s = num(value)?,
                "record_every" => {
                    self.sim.record_every =
                        value.parse::<usize>().map_err(|_| Error::ConfigParse {
                            line,
                            msg: format!(
                                "`{value}` is not a positive integer (key `record_every`)"
                            ),
                        })?
                }
                _ => return Err(bad_key()),
            },
            other => {
                return Err(Error::ConfigParse {
                    line,
                    msg: format!("unknown section `{other}`"),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.gfc.validate()?;
        self.network.validate()?;
        if !self.f_nominal_hz.is_finite() || self.f_nominal_hz <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "f_nominal_hz must be > 0, got {}",
                self.f_nominal_hz
            )));
        }
        Ok(())
    }

    /// Serialize back to the file format. Numbers use the shortest exact
    /// representation, so parse -> serialize -> parse round-trips.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        s.push_str("[gfc]\n");
        s.push_str(&format!("h_s = {}\n", self.gfc.h_inertia));
        s.push_str(&format!("zeta = {}\n", self.gfc.zeta));
        s.push_str(&format!("r_droop_pu = {}\n", self.gfc.r_droop));
        s.push_str(&format!("r_v_pu = {}\n", self.gfc.r_v));
        s.push_str(&format!("x_v_pu = {}\n", self.gfc.x_v));
        s.push_str(&format!("i_lim_pu = {}\n", self.gfc.i_lim));
        s.push_str(&format!("e_pu = {}\n", self.gfc.e_mag));
        s.push_str(&format!("p_set_pu = {}\n", self.gfc.p_set));
        s.push_str(&format!("feedback = {}\n", self.gfc.feedback_mode.label()));
        s.push_str("\n[network]\n");
        s.push_str(&format!("x_tf_pu = {}\n", self.network.x_tf));
        s.push_str(&format!("x_g_pu = {}\n", self.network.x_g));
        s.push_str(&format!("vg_pu = {}\n", self.network.vg_nominal));
        s.push_str(&format!("f_nominal_hz = {}\n", self.f_nominal_hz));
        s.push_str("\n[events]\n");
        for ev in &self.events {
            match *ev {
                Event::RocofRamp {
                    t_start,
                    rate_hz_per_s,
                    f_end_hz,
                } => s.push_str(&format!(
                    "rocof t={t_start} rate={rate_hz_per_s} f_end={f_end_hz}\n"
                )),
                Event::PhaseJump { t, delta_theta } => s.push_str(&format!(
                    "phase_jump t={t} deg={}\n",
                    degrees_preimage(delta_theta)
                )),
                Event::VoltageDip {
                    t_start,
                    duration_s,
                    v_dip,
                } => s.push_str(&format!(
                    "voltage_dip t={t_start} dur={duration_s} v={v_dip}\n"
                )),
                Event::SetpointStep { t, p_set_new } => {
                    s.push_str(&format!("setpoint_step t={t} p={p_set_new}\n"))
                }
            }
        }
        s.push_str("\n[sim]\n");
        s.push_str(&format!("t_end_s = {}\n", self.sim.t_end_s));
        s.push_str(&format!("dt_s = {}\n", self.sim.dt_s));
        s.push_str(&format!("record_every = {}\n", self.sim.record_every));
        s
    }
}

/// Degree value whose `to_radians()` reproduces `rad` exactly, so that
/// parse -> serialize -> parse round-trips bit-for-bit. `to_degrees` lands
/// within a couple of ulps of the preimage, and the preimage interval of
/// the contraction `to_radians` spans dozens of ulps, so a short walk
/// always finds it.
fn degrees_preimage(rad: f64) -> f64 {
    let mut deg = rad.to_degrees();
    for _ in 0..256 {
        let back = deg.to_radians();
        if back == rad {
            return deg;
        }
        deg = if back > rad {
            deg.next_down()
        } else {
            deg.next_up()
        };
    }
    rad.to_degrees()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_key_value(line: &str, line_no: usize) -> Result<(&str, &str)> {
    let (k, v) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
        line: line_no,
        msg: format!("expected `key = value`, got `{line}`"),
    })?;
    Ok((k.trim(), v.trim()))
}

fn parse_event_line(line: &str, line_no: usize) -> Result<Event> {
    let mut parts = line.split_whitespace();
    let kind = parts.next().unwrap();
    let mut fields = std::collections::HashMap::new();
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            msg: format!("event field `{part}` is not of the form key=value"),
        })?;
        let v: f64 = v.parse().map_err(|_| Error::ConfigParse {
            line: line_no,
            msg: format!("event field `{k}={v}` is not a number"),
        })?;
        fields.insert(k.to_string(), v);
    }
    let mut take = |key: &str| -> Result<f64> {
        fields.remove(key).ok_or_else(|| Error::ConfigParse {
            line: line_no,
            msg: format!("event `{kind}` is missing field `{key}=`"),
        })
    };
    let event = match kind {
        "rocof" => Event::RocofRamp {
            t_start: take("t")?,
            rate_hz_per_s: take("rate")?,
            f_end_hz: take("f_end")?,
        },
        "phase_jump" => Event::PhaseJump { t: take("t")?, delta_theta: take("deg")?.to_radians() },
        "voltage_dip" => Event::VoltageDip {
            t_start: take("t")?,
            duration_s: take("dur")?,
            v_dip: take("v")?,
        },
        "setpoint_step" => Event::SetpointStep { t: take("t")?, p_set_new: take("p")? },
        other => {
            return Err(Error::ConfigParse {
                line: line_no,
                msg: format!(
                    "unknown event `{other}` (expected rocof, phase_jump, voltage_dip, or setpoint_step)"
                ),
            })
        }
    };
    if let Some(extra) = fields.keys().next() {
        return Err(Error::ConfigParse {
            line: line_no,
            msg: format!("event `{kind}` has unexpected field `{extra}=`"),
        });
    }
    Ok(event)
}
