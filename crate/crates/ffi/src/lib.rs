//! C interface to `cubeset`.
//!
//! Every function returns a [`CubesetStatus`]. On failure a message is kept per thread and
//! read back with [`cubeset_last_error`]. Graphs are opaque handles released with
//! [`cubeset_graph_free`]; strings handed out are released with [`cubeset_string_free`].
//!
//! Pointer arguments must be NULL or valid for the stated length, handles must come from
//! this library and be freed at most once, and enum arguments must hold a declared value.
//! NULL where a value is required yields `NULL_POINTER`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cubeset::census::{count_with, sap_sum, CountMethod};
use cubeset::containers::{container_pipeline, ContainerParams, DEFAULT_BUDGET};
use cubeset::structure::closure;
use cubeset::{build_hypercube, load_graph, parse_graph, Error, RegularBipartiteGraph, Vertex};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubesetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    Domain = 4,
    SizeLimit = 5,
    EnumerationLimit = 6,
    Parse = 7,
    Regularity = 8,
    Bipartiteness = 9,
    Infeasible = 10,
    RandomizedFailure = 11,
    Precondition = 12,
    NoPath = 13,
    Io = 14,
    Panic = 15,
}

impl From<&Error> for CubesetStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::SizeLimit(_) => CubesetStatus::SizeLimit,
            Error::NoPath { .. } => CubesetStatus::NoPath,
            Error::Domain(_) => CubesetStatus::Domain,
            Error::Parse { .. } => CubesetStatus::Parse,
            Error::Regularity { .. } => CubesetStatus::Regularity,
            Error::Bipartiteness { .. } => CubesetStatus::Bipartiteness,
            Error::Infeasible(_) => CubesetStatus::Infeasible,
            Error::EnumerationLimit { .. } => CubesetStatus::EnumerationLimit,
            Error::RandomizedFailure { .. } => CubesetStatus::RandomizedFailure,
            Error::Precondition(_) => CubesetStatus::Precondition,
            Error::Io(_) => CubesetStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubesetCountMethod {
    Split = 0,
    Pairs = 1,
    Branch = 2,
}

impl From<CubesetCountMethod> for CountMethod {
    fn from(m: CubesetCountMethod) -> Self {
        match m {
            CubesetCountMethod::Split => CountMethod::Split,
            CubesetCountMethod::Pairs => CountMethod::Pairs,
            CubesetCountMethod::Branch => CountMethod::Branch,
        }
    }
}

/// Opaque graph handle.
pub struct CubesetGraph(RegularBipartiteGraph);

struct Failure(CubesetStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CubesetStatus::from(&e), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CubesetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CubesetStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {message}"));
            CubesetStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CubesetStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const CubesetGraph) -> Result<&'a RegularBipartiteGraph, Failure> {
    g.as_ref().map(|h| &h.0).ok_or_else(|| null("graph"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(CubesetStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_graph(out: *mut *mut CubesetGraph, g: RegularBipartiteGraph) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(CubesetGraph(g))));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| Failure(CubesetStatus::Panic, "interior NUL".into()))?;
    out.write(c.into_raw());
    Ok(())
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cubeset_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn cubeset_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cubeset_hypercube(d: usize, out: *mut *mut CubesetGraph) -> CubesetStatus {
    guard(|| put_graph(out, build_hypercube(d)?))
}

/// Reads a graph in the `bipartite <degree> <n_x> <n_y>` edge-list format.
#[no_mangle]
pub unsafe extern "C" fn cubeset_graph_load(
    path: *const c_char,
    out: *mut *mut CubesetGraph,
) -> CubesetStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put_graph(out, load_graph(path)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cubeset_graph_parse(
    text: *const c_char,
    out: *mut *mut CubesetGraph,
) -> CubesetStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        put_graph(out, parse_graph(text)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cubeset_graph_free(g: *mut CubesetGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cubeset_graph_vertex_count(
    g: *const CubesetGraph,
    out: *mut usize,
) -> CubesetStatus {
    guard(|| put(out, graph_ref(g)?.vertex_count()))
}

#[no_mangle]
pub unsafe extern "C" fn cubeset_graph_degree(
    g: *const CubesetGraph,
    out: *mut usize,
) -> CubesetStatus {
    guard(|| put(out, graph_ref(g)?.degree()))
}

unsafe fn set_operation(
    g: *const CubesetGraph,
    ids: *const u32,
    len: usize,
    out_ids: *mut u32,
    capacity: usize,
    out_len: *mut usize,
    op: impl FnOnce(&RegularBipartiteGraph, &cubeset::VertexSet) -> Result<cubeset::VertexSet, Error>,
) -> Result<(), Failure> {
    let graph = graph_ref(g)?;
    let input: &[u32] = if len == 0 {
        &[]
    } else if ids.is_null() {
        return Err(null("ids"));
    } else {
        slice::from_raw_parts(ids, len)
    };
    let n = graph.vertex_count();
    if let Some(&bad) = input.iter().find(|&&v| v as usize >= n) {
        return Err(Error::Domain(format!("vertex {bad} outside a {n}-vertex graph")).into());
    }
    let result = op(graph, &graph.set_of(input.iter().map(|&v| Vertex(v))))?.to_vec();
    put(out_len, result.len())?;
    if result.len() > capacity {
        return Err(Failure(
            CubesetStatus::BufferTooSmall,
            format!("{} ids do not fit in a buffer of {capacity}", result.len()),
        ));
    }
    if !result.is_empty() {
        if out_ids.is_null() {
            return Err(null("out_ids"));
        }
        ptr::copy_nonoverlapping(result.as_ptr(), out_ids, result.len());
    }
    Ok(())
}

/// Writes `N(A)` in ascending order. `*out_len` always receives the required length;
/// if it exceeds `capacity` nothing is written and `BUFFER_TOO_SMALL` is returned.
#[no_mangle]
pub unsafe extern "C" fn cubeset_neighborhood(
    g: *const CubesetGraph,
    ids: *const u32,
    len: usize,
    out_ids: *mut u32,
    capacity: usize,
    out_len: *mut usize,
) -> CubesetStatus {
    guard(|| {
        set_operation(g, ids, len, out_ids, capacity, out_len, |g, a| {
            Ok(g.neighborhood(a))
        })
    })
}

/// Closure `[A]` of a one-sided set, with the same buffer contract as
/// [`cubeset_neighborhood`].
#[no_mangle]
pub unsafe extern "C" fn cubeset_closure(
    g: *const CubesetGraph,
    ids: *const u32,
    len: usize,
    out_ids: *mut u32,
    capacity: usize,
    out_len: *mut usize,
) -> CubesetStatus {
    guard(|| set_operation(g, ids, len, out_ids, capacity, out_len, closure))
}

/// Number of independent sets of `Q_d` as a decimal string.
#[no_mangle]
pub unsafe extern "C" fn cubeset_count(
    d: usize,
    method: CubesetCountMethod,
    extended: bool,
    out: *mut *mut c_char,
) -> CubesetStatus {
    guard(|| put_string(out, count_with(d, method.into(), extended, 1)?.to_string()))
}

/// The dyadic sum as `"p/2^q"`.
#[no_mangle]
pub unsafe extern "C" fn cubeset_sap_sum(d: usize, out: *mut *mut c_char) -> CubesetStatus {
    guard(|| put_string(out, sap_sum(d)?.to_string()))
}

/// Runs the container pipeline on the class of `(a, g, v)` with default parameters for the
/// graph degree and writes the report as JSON. A `budget` of 0 selects the default.
#[no_mangle]
pub unsafe extern "C" fn cubeset_containers_json(
    graph: *const CubesetGraph,
    a: usize,
    g: usize,
    v: u32,
    seed: u64,
    budget: u64,
    out: *mut *mut c_char,
) -> CubesetStatus {
    guard(|| {
        let graph = graph_ref(graph)?;
        let mut params = ContainerParams::defaults_for(graph.degree())?;
        params.seed = seed;
        let budget = if budget == 0 { DEFAULT_BUDGET } else { budget };
        let report = container_pipeline(graph, a, g, Vertex(v), &params, budget)?;
        let json = serde_json::json!({
            "params": params,
            "coverage": report.coverage(),
            "passed": report.passed(),
            "report": report,
        });
        put_string(out, json.to_string())
    })
}
