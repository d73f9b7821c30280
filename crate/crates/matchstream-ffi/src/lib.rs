//! C ABI over the matchstream library. Graphs travel as opaque handles,
//! results as out-parameters, failures as status codes mirroring the CLI
//! exit codes; the per-thread error message fills in the detail.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use matchstream::multipass::{solve, MultipassConfig};
use matchstream::oracle::{exact_mwm, OracleBudget};
use matchstream::random_arrival::{rand_arr_matching, RandArrParams};
use matchstream::stream::{MemoryMeter, StreamSession};
use matchstream::unweighted::random_arrival_unweighted;
use matchstream::{Error, WeightedGraph};

/// Status codes; nonzero values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    /// I/O failure or internal error.
    Fail = 1,
    /// Invalid parameter or malformed input.
    Param = 2,
    /// Memory budget violated.
    Budget = 3,
    /// Instance exceeds the oracle budget.
    Oversize = 4,
}

/// Opaque graph handle.
pub struct MsGraph {
    inner: WeightedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn status_of(err: &Error) -> MsStatus {
    match err.exit_code() {
        2 => MsStatus::Param,
        3 => MsStatus::Budget,
        4 => MsStatus::Oversize,
        _ => MsStatus::Fail,
    }
}

fn fail(err: Error) -> MsStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Run a closure, converting panics into Fail instead of unwinding across
/// the FFI boundary.
fn guarded(f: impl FnOnce() -> MsStatus) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            MsStatus::Fail
        }
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn ms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn write_handle(out: *mut *mut MsGraph, g: WeightedGraph) -> MsStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return MsStatus::Param;
    }
    *out = Box::into_raw(Box::new(MsGraph { inner: g }));
    MsStatus::Ok
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, MsStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} pointer is null"));
        return Err(MsStatus::Param);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        MsStatus::Param
    })
}

unsafe fn deref_graph<'a>(g: *const MsGraph) -> Result<&'a WeightedGraph, MsStatus> {
    if g.is_null() {
        set_error("graph handle is null");
        return Err(MsStatus::Param);
    }
    Ok(&(*g).inner)
}

/// Parse a graph from its text serialization ("n m" header, then one
/// "u v w" line per edge).
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. On Ok, `*out` owns a handle to release with `ms_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_parse(
    text: *const c_char,
    out: *mut *mut MsGraph,
) -> MsStatus {
    guarded(|| {
        let text = match read_str(text, "graph text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match WeightedGraph::parse(text) {
            Ok(g) => write_handle(out, g),
            Err(e) => fail(e),
        }
    })
}

/// Load a graph from a file in the text serialization.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. On Ok, `*out` owns a handle to release with `ms_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_load(path: *const c_char, out: *mut *mut MsGraph) -> MsStatus {
    guarded(|| {
        let path = match read_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                set_error(&format!("{path}: {e}"));
                return MsStatus::Fail;
            }
        };
        match WeightedGraph::parse(&text) {
            Ok(g) => write_handle(out, g),
            Err(e) => fail(e),
        }
    })
}

/// Build a graph from parallel edge arrays of length `m`.
///
/// # Safety
/// `us`, `vs`, `ws` must point to `m` readable elements (or `m` may be 0);
/// `out` must be a valid pointer. On Ok, `*out` owns a handle to release
/// with `ms_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_from_edges(
    n: u32,
    us: *const u32,
    vs: *const u32,
    ws: *const i64,
    m: usize,
    out: *mut *mut MsGraph,
) -> MsStatus {
    guarded(|| {
        if m > 0 && (us.is_null() || vs.is_null() || ws.is_null()) {
            set_error("edge array pointer is null");
            return MsStatus::Param;
        }
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            edges.push((*us.add(i), *vs.add(i), *ws.add(i)));
        }
        match WeightedGraph::with_default_cap(n, edges) {
            Ok(g) => write_handle(out, g),
            Err(e) => fail(e),
        }
    })
}

/// Release a handle from ms_graph_parse/load/from_edges. Null is a no-op.
///
/// # Safety
/// `g` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_free(g: *mut MsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices.
///
/// # Safety
/// `g` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_n(g: *const MsGraph) -> u32 {
    match deref_graph(g) {
        Ok(gr) => gr.n(),
        Err(_) => 0,
    }
}

/// Number of edges.
///
/// # Safety
/// `g` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_m(g: *const MsGraph) -> u64 {
    match deref_graph(g) {
        Ok(gr) => gr.m() as u64,
        Err(_) => 0,
    }
}

/// Exact maximum-weight matching weight (desk-scale sizes only).
///
/// # Safety
/// `g` must be a live handle; `out_weight` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_oracle_mwm(g: *const MsGraph, out_weight: *mut i64) -> MsStatus {
    guarded(|| {
        let gr = match deref_graph(g) {
            Ok(gr) => gr,
            Err(s) => return s,
        };
        if out_weight.is_null() {
            set_error("out_weight is null");
            return MsStatus::Param;
        }
        match exact_mwm(gr, &OracleBudget::default()) {
            Ok(m) => {
                *out_weight = m.weight();
                MsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Single-pass unweighted pipeline on a seeded random arrival order.
/// `p` in (0,1) is the greedy prefix fraction.
///
/// # Safety
/// `g` must be a live handle; `out_size` and `out_peak_edges` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn ms_run_unweighted(
    g: *const MsGraph,
    seed: u64,
    p: f64,
    out_size: *mut u64,
    out_peak_edges: *mut u64,
) -> MsStatus {
    guarded(|| {
        let gr = match deref_graph(g) {
            Ok(gr) => gr,
            Err(s) => return s,
        };
        if out_size.is_null() || out_peak_edges.is_null() {
            set_error("out pointer is null");
            return MsStatus::Param;
        }
        let session = StreamSession::new(gr.clone(), seed);
        let mut meter = MemoryMeter::unlimited();
        match random_arrival_unweighted(&session, p, &mut meter) {
            Ok(out) => {
                *out_size = out.matching.len() as u64;
                *out_peak_edges = meter.peak() as u64;
                MsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Single-pass weighted random-arrival pipeline with default parameters.
///
/// # Safety
/// `g` must be a live handle; `out_weight` and `out_peak_edges` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ms_run_random_arrival(
    g: *const MsGraph,
    seed: u64,
    out_weight: *mut i64,
    out_peak_edges: *mut u64,
) -> MsStatus {
    guarded(|| {
        let gr = match deref_graph(g) {
            Ok(gr) => gr,
            Err(s) => return s,
        };
        if out_weight.is_null() || out_peak_edges.is_null() {
            set_error("out pointer is null");
            return MsStatus::Param;
        }
        let session = StreamSession::new(gr.clone(), seed);
        let mut meter = MemoryMeter::unlimited();
        match rand_arr_matching(&session, &RandArrParams::default(), &mut meter) {
            Ok((m, report)) => {
                *out_weight = m.weight();
                *out_peak_edges = report.peak_edges as u64;
                MsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Multi-pass solver from the empty matching under the relaxed defaults for
/// `eps`; `iters` bounds improvement rounds (0 keeps the default).
///
/// # Safety
/// `g` must be a live handle; `out_weight` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_run_multipass(
    g: *const MsGraph,
    seed: u64,
    eps: f64,
    iters: u64,
    out_weight: *mut i64,
) -> MsStatus {
    guarded(|| {
        let gr = match deref_graph(g) {
            Ok(gr) => gr,
            Err(s) => return s,
        };
        if out_weight.is_null() {
            set_error("out_weight is null");
            return MsStatus::Param;
        }
        let mut cfg = match MultipassConfig::relaxed(eps) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        cfg.seed = seed;
        if iters > 0 {
            cfg.iters = iters as usize;
        }
        match solve(gr, &cfg) {
            Ok(out) => {
                *out_weight = out.matching.weight();
                MsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
