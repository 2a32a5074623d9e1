//! C interface. Networks, query structures and results are opaque handles
//! released with their `_free` function; every fallible call returns a
//! [`SpfarStatus`] and writes its result through an out pointer.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spfar::exact::SCALE;
use spfar::sp::engine::SpStructure;
use spfar::{Error, FarthestResult, Network, PointOnEdge, Q};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpfarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotSimple = 4,
    NotConnected = 5,
    InvalidWeight = 6,
    Overflow = 7,
    InvalidQuery = 8,
    NotSeriesParallel = 9,
    OutOfRange = 10,
    Internal = 11,
}

impl From<Error> for SpfarStatus {
    fn from(e: Error) -> SpfarStatus {
        match e {
            Error::Parse(_) => SpfarStatus::Parse,
            Error::NotSimple(_) => SpfarStatus::NotSimple,
            Error::NotConnected => SpfarStatus::NotConnected,
            Error::NonPositiveWeight(_) | Error::WeightPrecisionExceeded(_) => SpfarStatus::InvalidWeight,
            Error::Overflow => SpfarStatus::Overflow,
            Error::InvalidQuery(_) => SpfarStatus::InvalidQuery,
            Error::NotSeriesParallel => SpfarStatus::NotSeriesParallel,
            _ => SpfarStatus::Internal,
        }
    }
}

/// An exact fraction `num / den` with `den > 0`, in lowest terms.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpfarRational {
    pub num: i64,
    pub den: i64,
}

pub struct SpfarNetwork(Network);

pub struct SpfarStructure(SpStructure);

pub struct SpfarResult {
    distance: SpfarRational,
    points: Vec<(usize, SpfarRational)>,
}

fn guard(f: impl FnOnce() -> Result<(), SpfarStatus>) -> SpfarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpfarStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => SpfarStatus::Internal,
    }
}

fn rational(q: Q) -> Result<SpfarRational, SpfarStatus> {
    let num = i64::try_from(*q.numer()).map_err(|_| SpfarStatus::Overflow)?;
    let den = i64::try_from(*q.denom()).map_err(|_| SpfarStatus::Overflow)?;
    Ok(SpfarRational { num, den })
}

fn weight(q: Q) -> Result<SpfarRational, SpfarStatus> {
    rational(q / Q::from_integer(SCALE as i128))
}

unsafe fn put<T>(out: *mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

/// Parses a network in the text format (`n m`, then `m` lines `u v w`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spfar_network_parse(text: *const c_char, out: *mut *mut SpfarNetwork) -> SpfarStatus {
    if text.is_null() || out.is_null() {
        return SpfarStatus::NullPointer;
    }
    guard(|| {
        let s = CStr::from_ptr(text).to_str().map_err(|_| SpfarStatus::InvalidUtf8)?;
        put(out, SpfarNetwork(Network::parse(s)?));
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle from [`spfar_network_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spfar_network_free(net: *mut SpfarNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live network handle.
#[no_mangle]
pub unsafe extern "C" fn spfar_network_vertex_count(net: *const SpfarNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.vertex_count())
}

/// # Safety
/// `net` must be a live network handle.
#[no_mangle]
pub unsafe extern "C" fn spfar_network_edge_count(net: *const SpfarNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.edge_count())
}

/// Builds the query structure. The network handle stays owned by the caller.
///
/// # Safety
/// `net` must be a live network handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spfar_structure_build(net: *const SpfarNetwork, out: *mut *mut SpfarStructure) -> SpfarStatus {
    let (Some(net), false) = (net.as_ref(), out.is_null()) else { return SpfarStatus::NullPointer };
    guard(|| {
        put(out, SpfarStructure(SpStructure::build(&net.0)?));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`spfar_structure_build`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spfar_structure_free(s: *mut SpfarStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

fn query_point(s: &SpfarStructure, edge: usize, lambda: SpfarRational) -> Result<PointOnEdge, SpfarStatus> {
    if lambda.den == 0 {
        return Err(SpfarStatus::InvalidQuery);
    }
    let q = PointOnEdge::new(edge, Q::new(lambda.num as i128, lambda.den as i128));
    q.validate(s.0.network())?;
    Ok(q.canonical(s.0.network()))
}

/// Farthest distance from the point at `lambda` along `edge`.
///
/// # Safety
/// `s` must be a live structure handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spfar_farthest_distance(s: *const SpfarStructure, edge: usize, lambda: SpfarRational, out: *mut SpfarRational) -> SpfarStatus {
    let (Some(s), false) = (s.as_ref(), out.is_null()) else { return SpfarStatus::NullPointer };
    guard(|| {
        let q = query_point(s, edge, lambda)?;
        *out = weight(s.0.farthest_distance(&q))?;
        Ok(())
    })
}

/// Farthest distance and every farthest point.
///
/// # Safety
/// `s` must be a live structure handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spfar_farthest_points(s: *const SpfarStructure, edge: usize, lambda: SpfarRational, out: *mut *mut SpfarResult) -> SpfarStatus {
    let (Some(s), false) = (s.as_ref(), out.is_null()) else { return SpfarStatus::NullPointer };
    guard(|| {
        let q = query_point(s, edge, lambda)?;
        let r: FarthestResult = s.0.farthest_points(&q);
        let points = r.points.iter().map(|p| Ok((p.edge, rational(p.lambda)?))).collect::<Result<_, SpfarStatus>>()?;
        put(out, SpfarResult { distance: weight(r.distance)?, points });
        Ok(())
    })
}

/// # Safety
/// `r` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn spfar_result_distance(r: *const SpfarResult) -> SpfarRational {
    r.as_ref().map_or(SpfarRational { num: 0, den: 1 }, |r| r.distance)
}

/// # Safety
/// `r` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn spfar_result_count(r: *const SpfarResult) -> usize {
    r.as_ref().map_or(0, |r| r.points.len())
}

/// Point `i` of the result, in canonical order (by edge, then lambda).
///
/// # Safety
/// `r` must be a live result handle; `edge` and `lambda` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn spfar_result_point(r: *const SpfarResult, i: usize, edge: *mut usize, lambda: *mut SpfarRational) -> SpfarStatus {
    let Some(r) = r.as_ref() else { return SpfarStatus::NullPointer };
    if edge.is_null() || lambda.is_null() {
        return SpfarStatus::NullPointer;
    }
    let Some(&(e, l)) = r.points.get(i) else { return SpfarStatus::OutOfRange };
    *edge = e;
    *lambda = l;
    SpfarStatus::Ok
}

/// # Safety
/// `r` must be null or a handle from [`spfar_farthest_points`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spfar_result_free(r: *mut SpfarResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// A static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn spfar_status_message(status: SpfarStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SpfarStatus::Ok => c"ok",
        SpfarStatus::NullPointer => c"null pointer argument",
        SpfarStatus::InvalidUtf8 => c"input is not valid UTF-8",
        SpfarStatus::Parse => c"network file could not be parsed",
        SpfarStatus::NotSimple => c"network has a loop or parallel edges",
        SpfarStatus::NotConnected => c"network is not connected",
        SpfarStatus::InvalidWeight => c"edge weight is not positive or too precise",
        SpfarStatus::Overflow => c"value exceeds the supported range",
        SpfarStatus::InvalidQuery => c"query point does not exist",
        SpfarStatus::NotSeriesParallel => c"network is not two-terminal series-parallel",
        SpfarStatus::OutOfRange => c"index out of range",
        SpfarStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    #[test]
    fn null_handles_are_refused() {
        let mut out = ptr::null_mut();
        unsafe {
            assert_eq!(spfar_network_parse(ptr::null(), &mut out), SpfarStatus::NullPointer);
            assert_eq!(spfar_structure_build(ptr::null(), ptr::null_mut()), SpfarStatus::NullPointer);
            spfar_network_free(ptr::null_mut());
            assert_eq!(spfar_result_count(ptr::null()), 0);
        }
    }
}
