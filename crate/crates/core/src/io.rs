//! Text formats: CSV tables and JSON pole lists, all floats at 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::scattering::SweepRow;
use crate::siegert::{PoleRecord, SpectralPole};
use crate::wavefunction::Wavefunction;

/// Formats a float with 17 significant digits, which round-trips any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SWEEP_HEADER: &str = "k,E,T,R,ReB,ImB,ReC,ImC";
pub const WAVEFUNCTION_HEADER: &str = "x,re,im,abs";

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        let fields = [
            r.k,
            r.energy,
            r.transmission,
            r.reflection,
            r.b.re,
            r.b.im,
            r.c.re,
            r.c.im,
        ];
        let line: Vec<String> = fields.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_wavefunction_csv<W: Write>(mut out: W, wf: &Wavefunction) -> io::Result<()> {
    writeln!(out, "{WAVEFUNCTION_HEADER}")?;
    for s in &wf.samples {
        writeln!(
            out,
            "{},{},{},{}",
            s.site,
            fmt17(s.value.re),
            fmt17(s.value.im),
            fmt17(s.magnitude)
        )?;
    }
    Ok(())
}

pub fn pole_records(poles: &[SpectralPole]) -> Vec<PoleRecord> {
    poles.iter().map(PoleRecord::from).collect()
}

/// Pretty JSON with every float written at 17 significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, Fmt17Json(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

struct Fmt17Json<'a>(PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident $(($arg:ident: $ty:ty))?),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
                self.0.$name(w $(, $arg)?)
            }
        )*
    };
}

impl Formatter for Fmt17Json<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }

    forward!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        begin_object_value,
        end_object_value,
    );
}

/// JSON array of pole objects.
pub fn poles_json(poles: &[SpectralPole]) -> String {
    to_json(&pole_records(poles))
}
