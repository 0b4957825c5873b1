//! Protocol-stack accounting for the three ways a vehicle-mounted cell
//! can integrate with the network that backhauls it.
//!
//! * [`ArchKind::MobileGnb`]: the vehicle carries a complete gNB plus
//!   local core functions; its traffic leaves through an onboard UE
//!   function attached to an overlay gNB, tunneled to the home core.
//! * [`ArchKind::GnbDuRelay`]: the vehicle carries only a gNB-DU whose
//!   F1 interface to a ground CU rides the same overlay attachment.
//! * [`ArchKind::IabNode`]: the vehicle is an IAB node, relayed at
//!   layer 2 over BAP to its donor, one radio hop away.
//!
//! For each option the module builds user-plane and control-plane paths
//! as ordered segments, each carrying the header stack present on that
//! hop above the user payload (outermost first, nested tunnels counted
//! once per nesting level). On top of these it computes per-segment
//! overhead bytes, the control-plane round trip to the RRC-terminating
//! node, the contention-resolution check for initial attachment, and a
//! side-by-side comparison table.

use std::collections::BTreeMap;
use thiserror::Error;

/// Contention-resolution window an attaching UE must fit inside:
/// the largest value the standard timer can be configured to, seconds.
pub const DEFAULT_CRT_LIMIT_S: f64 = 0.064;
/// Default one-way latency of a radio hop, seconds.
pub const DEFAULT_RADIO_LATENCY_S: f64 = 0.002;
/// Default one-way latency of a wired hop, seconds.
pub const DEFAULT_WIRE_LATENCY_S: f64 = 0.0005;
/// Default per-node processing delay, seconds.
pub const DEFAULT_PROCESSING_S: f64 = 0.002;

/// Problems building models or parsing override files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArchError {
    #[error("line {line}: expected \"LAYER<TAB>bytes\", got {got:?}")]
    MalformedHeaderLine { line: usize, got: String },
    #[error("line {line}: unknown protocol layer {name:?}")]
    UnknownLayer { line: usize, name: String },
    #[error("line {line}: expected \"key<TAB>milliseconds\", got {got:?}")]
    MalformedLatencyLine { line: usize, got: String },
    #[error("line {line}: unknown latency key {name:?}")]
    UnknownLatencyKey { line: usize, name: String },
    #[error("line {line}: latency must be non-negative")]
    NegativeLatency { line: usize },
    #[error("segment index {index} out of range, path has {len} segments")]
    SegmentOutOfRange { index: usize, len: usize },
}

// ====================================================================
// Layers and header sizes
// ====================================================================

/// Protocol layers that can appear on a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Sdap,
    Pdcp,
    Rlc,
    Mac,
    Bap,
    GtpU,
    Udp,
    Ip,
    Sctp,
    F1ap,
    Ngap,
    Rrc,
    Nas,
}

impl Layer {
    pub const ALL: [Layer; 13] = [
        Layer::Sdap,
        Layer::Pdcp,
        Layer::Rlc,
        Layer::Mac,
        Layer::Bap,
        Layer::GtpU,
        Layer::Udp,
        Layer::Ip,
        Layer::Sctp,
        Layer::F1ap,
        Layer::Ngap,
        Layer::Rrc,
        Layer::Nas,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Sdap => "SDAP",
            Layer::Pdcp => "PDCP",
            Layer::Rlc => "RLC",
            Layer::Mac => "MAC",
            Layer::Bap => "BAP",
            Layer::GtpU => "GTP-U",
            Layer::Udp => "UDP",
            Layer::Ip => "IP",
            Layer::Sctp => "SCTP",
            Layer::F1ap => "F1AP",
            Layer::Ngap => "NGAP",
            Layer::Rrc => "RRC",
            Layer::Nas => "NAS",
        }
    }

    pub fn from_str_exact(name: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.as_str() == name)
    }

    /// The plane this layer natively belongs to. A user-plane layer can
    /// still show up inside a control-plane stack when signalling rides
    /// a data session, so this is metadata, not a filter.
    pub fn native_plane(self) -> LayerPlane {
        match self {
            Layer::Sdap | Layer::GtpU | Layer::Udp => LayerPlane::Up,
            Layer::Sctp | Layer::F1ap | Layer::Ngap | Layer::Rrc | Layer::Nas => LayerPlane::Cp,
            Layer::Pdcp | Layer::Rlc | Layer::Mac | Layer::Bap | Layer::Ip => LayerPlane::Both,
        }
    }
}

impl std::fmt::Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which plane a layer natively serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerPlane {
    Cp,
    Up,
    Both,
}

/// Which path of a model an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Cp,
    Up,
}

/// Header bytes per layer.
///
/// Defaults: IP 20, UDP 8, GTP-U 8, SDAP 1, PDCP 3, RLC 3, MAC 3,
/// BAP 2, SCTP 28 (common header plus one data chunk). Signalling
/// protocols (F1AP, NGAP, RRC, NAS) count 0 bytes: their message bodies
/// are out of scope, only their transport below them is costed.
#[derive(Debug, Clone, PartialEq)]
pub struct HeaderTable {
    bytes: BTreeMap<Layer, u32>,
}

impl Default for HeaderTable {
    fn default() -> Self {
        let mut bytes = BTreeMap::new();
        bytes.insert(Layer::Ip, 20);
        bytes.insert(Layer::Udp, 8);
        bytes.insert(Layer::GtpU, 8);
        bytes.insert(Layer::Sdap, 1);
        bytes.insert(Layer::Pdcp, 3);
        bytes.insert(Layer::Rlc, 3);
        bytes.insert(Layer::Mac, 3);
        bytes.insert(Layer::Bap, 2);
        bytes.insert(Layer::Sctp, 28);
        bytes.insert(Layer::F1ap, 0);
        bytes.insert(Layer::Ngap, 0);
        bytes.insert(Layer::Rrc, 0);
        bytes.insert(Layer::Nas, 0);
        Self { bytes }
    }
}

impl HeaderTable {
    pub fn bytes(&self, layer: Layer) -> u32 {
        *self.bytes.get(&layer).expect("all layers have defaults")
    }

    pub fn set(&mut self, layer: Layer, bytes: u32) {
        self.bytes.insert(layer, bytes);
    }

    /// Applies overrides from a `LAYER<TAB>bytes` file. Blank lines and
    /// `#` comments are ignored; layers not mentioned keep defaults.
    pub fn with_overrides(mut self, text: &str) -> Result<Self, ArchError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let mut parts = content.split('\t');
            let (name, value) = match (parts.next(), parts.next(), parts.next()) {
                (Some(n), Some(v), None) => (n.trim(), v.trim()),
                _ => return Err(ArchError::MalformedHeaderLine { line, got: raw.to_string() }),
            };
            let layer = Layer::from_str_exact(name)
                .ok_or_else(|| ArchError::UnknownLayer { line, name: name.to_string() })?;
            let bytes: u32 = value
                .parse()
                .map_err(|_| ArchError::MalformedHeaderLine { line, got: raw.to_string() })?;
            self.bytes.insert(layer, bytes);
        }
        Ok(self)
    }
}

// ====================================================================
// Paths
// ====================================================================

/// One layer instance on a segment, with its resolved header size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub layer: Layer,
    pub header_bytes: u32,
    pub plane: LayerPlane,
}

/// Physical medium of a hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Medium {
    Radio,
    Wire,
}

/// One hop of a path with the stacks present above the user payload.
/// Stacks are ordered outermost first.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    pub from_node: &'static str,
    pub to_node: &'static str,
    pub medium: Medium,
    pub one_way_latency_s: f64,
    pub up_stack: Vec<LayerSpec>,
    pub cp_stack: Vec<LayerSpec>,
}

impl PathSegment {
    pub fn stack(&self, plane: Plane) -> &[LayerSpec] {
        match plane {
            Plane::Up => &self.up_stack,
            Plane::Cp => &self.cp_stack,
        }
    }
}

/// One-way hop latencies and per-node processing used to time paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyConfig {
    /// Access and other radio hops, seconds.
    pub radio_s: f64,
    /// Wired hops, seconds.
    pub wire_s: f64,
    /// Override for the radio backhaul hop; falls back to `radio_s`.
    pub backhaul_s: Option<f64>,
    /// Forwarding/processing delay charged per traversed node, seconds.
    pub processing_s: f64,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        Self {
            radio_s: DEFAULT_RADIO_LATENCY_S,
            wire_s: DEFAULT_WIRE_LATENCY_S,
            backhaul_s: None,
            processing_s: DEFAULT_PROCESSING_S,
        }
    }
}

impl LatencyConfig {
    fn backhaul(&self) -> f64 {
        self.backhaul_s.unwrap_or(self.radio_s)
    }

    /// Applies overrides from a `key<TAB>milliseconds` file. Keys:
    /// `radio_ms`, `wire_ms`, `backhaul_ms`, `processing_ms`. Blank
    /// lines and `#` comments are ignored.
    pub fn with_overrides(mut self, text: &str) -> Result<Self, ArchError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let mut parts = content.split('\t');
            let (name, value) = match (parts.next(), parts.next(), parts.next()) {
                (Some(n), Some(v), None) => (n.trim(), v.trim()),
                _ => return Err(ArchError::MalformedLatencyLine { line, got: raw.to_string() }),
            };
            let ms: f64 = value
                .parse()
                .map_err(|_| ArchError::MalformedLatencyLine { line, got: raw.to_string() })?;
            if ms.is_nan() || ms < 0.0 {
                return Err(ArchError::NegativeLatency { line });
            }
            let s = ms / 1e3;
            match name {
                "radio_ms" => self.radio_s = s,
                "wire_ms" => self.wire_s = s,
                "backhaul_ms" => self.backhaul_s = Some(s),
                "processing_ms" => self.processing_s = s,
                _ => return Err(ArchError::UnknownLatencyKey { line, name: name.to_string() }),
            }
        }
        Ok(self)
    }
}

// ====================================================================
// Architectures
// ====================================================================

/// The three integration options for the mobile cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchKind {
    MobileGnb,
    GnbDuRelay,
    IabNode,
}

impl ArchKind {
    pub const ALL: [ArchKind; 3] = [ArchKind::MobileGnb, ArchKind::GnbDuRelay, ArchKind::IabNode];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchKind::MobileGnb => "mobile-gnb",
            ArchKind::GnbDuRelay => "gnb-du-relay",
            ArchKind::IabNode => "iab-node",
        }
    }

    pub fn from_str_exact(name: &str) -> Option<ArchKind> {
        ArchKind::ALL.into_iter().find(|k| k.as_str() == name)
    }

    /// Deployment capabilities of this option.
    pub fn capabilities(self) -> Capabilities {
        match self {
            ArchKind::MobileGnb => Capabilities {
                onboard_upf: true,
                roaming_free: true,
                backhaul_agnostic: true,
                e2e_qos: false,
            },
            ArchKind::GnbDuRelay => Capabilities {
                onboard_upf: false,
                roaming_free: true,
                backhaul_agnostic: true,
                e2e_qos: false,
            },
            ArchKind::IabNode => Capabilities {
                onboard_upf: false,
                roaming_free: false,
                backhaul_agnostic: false,
                e2e_qos: true,
            },
        }
    }
}

impl std::fmt::Display for ArchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a deployment can or cannot offer, independent of the numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    /// Local user-plane anchor can ride on the vehicle.
    pub onboard_upf: bool,
    /// Home-network subscribers attach without roaming agreements.
    pub roaming_free: bool,
    /// Works over any overlay operator's gNBs.
    pub backhaul_agnostic: bool,
    /// End-to-end QoS control across the backhaul.
    pub e2e_qos: bool,
}

/// A fully assembled architecture: both paths plus derived facts.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchModel {
    pub kind: ArchKind,
    /// UE to user-plane anchor, ordered from the UE outward.
    pub up_path: Vec<PathSegment>,
    /// UE to control-plane anchor, ordered from the UE outward.
    pub cp_path: Vec<PathSegment>,
    /// Deepest GTP-U nesting found on any user-plane segment.
    pub tunnel_depth_backhaul: u32,
    /// Node that terminates the UE's RRC connection.
    pub rrc_terminator: &'static str,
}

impl ArchModel {
    /// Index of the radio backhaul hop (the radio segment that does not
    /// start at the UE). Identical for both planes by construction.
    pub fn radio_backhaul_index(&self) -> usize {
        self.up_path
            .iter()
            .position(|s| s.medium == Medium::Radio && s.from_node != "UE")
            .expect("every architecture has a radio backhaul hop")
    }
}

/// Assembles the paths of one architecture using the given header sizes
/// and hop latencies.
pub fn build_arch(kind: ArchKind, headers: &HeaderTable, latencies: &LatencyConfig) -> ArchModel {
    let spec = |layer: Layer| LayerSpec {
        layer,
        header_bytes: headers.bytes(layer),
        plane: layer.native_plane(),
    };
    let stack = |layers: &[Layer]| layers.iter().copied().map(spec).collect::<Vec<_>>();
    let seg = |from: &'static str,
               to: &'static str,
               medium: Medium,
               latency: f64,
               up: &[Layer],
               cp: &[Layer]| PathSegment {
        from_node: from,
        to_node: to,
        medium,
        one_way_latency_s: latency,
        up_stack: stack(up),
        cp_stack: stack(cp),
    };

    use Layer::*;
    let radio = latencies.radio_s;
    let wire = latencies.wire_s;
    let backhaul = latencies.backhaul();

    let (up_path, cp_path, rrc_terminator) = match kind {
        // Complete gNB onboard; one PDU session to the overlay carries
        // the home-core tunnels for both planes.
        ArchKind::MobileGnb => {
            let up = vec![
                seg("UE", "MC-gNB", Medium::Radio, radio, &[Mac, Rlc, Pdcp, Sdap], &[]),
                seg(
                    "MC-gNB",
                    "ON-gNB",
                    Medium::Radio,
                    backhaul,
                    &[Mac, Rlc, Pdcp, Sdap, Ip, Udp, GtpU],
                    &[],
                ),
                seg(
                    "ON-gNB",
                    "ON-UPF",
                    Medium::Wire,
                    wire,
                    &[Ip, Udp, GtpU, Ip, Udp, GtpU],
                    &[],
                ),
                seg("ON-UPF", "HN-UPF", Medium::Wire, wire, &[Ip, Udp, GtpU], &[]),
            ];
            let cp = vec![
                seg("UE", "MC-gNB", Medium::Radio, radio, &[], &[Mac, Rlc, Pdcp, Rrc]),
                seg(
                    "MC-gNB",
                    "ON-gNB",
                    Medium::Radio,
                    backhaul,
                    &[],
                    &[Mac, Rlc, Pdcp, Sdap, Ip, Sctp, Ngap],
                ),
                seg(
                    "ON-gNB",
                    "ON-UPF",
                    Medium::Wire,
                    wire,
                    &[],
                    &[Ip, Udp, GtpU, Ip, Sctp, Ngap],
                ),
                seg("ON-UPF", "HN-AMF", Medium::Wire, wire, &[], &[Ip, Sctp, Ngap]),
            ];
            (up, cp, "MC-gNB")
        }
        // Only the DU rides along; F1 stretches over the overlay to a
        // ground CU that keeps the home-core interfaces.
        ArchKind::GnbDuRelay => {
            let up = vec![
                seg("UE", "MC-DU", Medium::Radio, radio, &[Mac, Rlc], &[]),
                seg(
                    "MC-DU",
                    "ON-gNB",
                    Medium::Radio,
                    backhaul,
                    &[Mac, Rlc, Pdcp, Sdap, Ip, Udp, GtpU],
                    &[],
                ),
                seg(
                    "ON-gNB",
                    "ON-UPF",
                    Medium::Wire,
                    wire,
                    &[Ip, Udp, GtpU, Ip, Udp, GtpU],
                    &[],
                ),
                seg("ON-UPF", "MC-CU", Medium::Wire, wire, &[Ip, Udp, GtpU], &[]),
                seg("MC-CU", "HN-UPF", Medium::Wire, wire, &[Ip, Udp, GtpU], &[]),
            ];
            let cp = vec![
                seg("UE", "MC-DU", Medium::Radio, radio, &[], &[Mac, Rlc]),
                seg(
                    "MC-DU",
                    "ON-gNB",
                    Medium::Radio,
                    backhaul,
                    &[],
                    &[Mac, Rlc, Pdcp, Sdap, Ip, Sctp, F1ap],
                ),
                seg(
                    "ON-gNB",
                    "ON-UPF",
                    Medium::Wire,
                    wire,
                    &[],
                    &[Ip, Udp, GtpU, Ip, Sctp, F1ap],
                ),
                seg("ON-UPF", "MC-CU", Medium::Wire, wire, &[], &[Ip, Sctp, F1ap]),
                seg("MC-CU", "HN-AMF", Medium::Wire, wire, &[], &[Ip, Sctp, Ngap]),
            ];
            (up, cp, "MC-CU")
        }
        // Layer-2 relaying: BAP routes F1 over the radio backhaul to
        // the donor, no overlay tunnels involved.
        ArchKind::IabNode => {
            let up = vec![
                seg("UE", "MC-DU", Medium::Radio, radio, &[Mac, Rlc], &[]),
                seg(
                    "MC-DU",
                    "IAB-donor-DU",
                    Medium::Radio,
                    backhaul,
                    &[Mac, Rlc, Bap, Ip, Udp, GtpU],
                    &[],
                ),
                seg("IAB-donor-DU", "IAB-donor-CU", Medium::Wire, wire, &[Ip, Udp, GtpU], &[]),
                seg("IAB-donor-CU", "UE-UPF", Medium::Wire, wire, &[Ip, Udp, GtpU], &[]),
            ];
            let cp = vec![
                seg("UE", "MC-DU", Medium::Radio, radio, &[], &[Mac, Rlc]),
                seg(
                    "MC-DU",
                    "IAB-donor-DU",
                    Medium::Radio,
                    backhaul,
                    &[],
                    &[Mac, Rlc, Bap, Ip, Sctp, F1ap],
                ),
                seg("IAB-donor-DU", "IAB-donor-CU", Medium::Wire, wire, &[], &[Ip, Sctp, F1ap]),
                seg("IAB-donor-CU", "UE-AMF", Medium::Wire, wire, &[], &[Ip, Sctp, Ngap]),
            ];
            (up, cp, "IAB-donor-CU")
        }
    };

    let tunnel_depth_backhaul = up_path
        .iter()
        .map(|s| s.up_stack.iter().filter(|l| l.layer == Layer::GtpU).count() as u32)
        .max()
        .unwrap_or(0);

    ArchModel { kind, up_path, cp_path, tunnel_depth_backhaul, rrc_terminator }
}

/// Header bytes stacked above the user payload on one segment of the
/// selected plane's path.
pub fn overhead_bytes(arch: &ArchModel, plane: Plane, segment_index: usize) -> Result<u32, ArchError> {
    let path = match plane {
        Plane::Up => &arch.up_path,
        Plane::Cp => &arch.cp_path,
    };
    let segment = path
        .get(segment_index)
        .ok_or(ArchError::SegmentOutOfRange { index: segment_index, len: path.len() })?;
    Ok(segment.stack(plane).iter().map(|l| l.header_bytes).sum())
}

/// Control-plane round trip from the UE to the RRC-terminating node:
/// twice the sum of one-way segment latencies plus per-node processing
/// at every traversed node (terminator included, UE excluded).
pub fn path_rtt(arch: &ArchModel, processing_per_node_s: f64) -> f64 {
    let mut one_way = 0.0;
    for segment in &arch.cp_path {
        one_way += segment.one_way_latency_s + processing_per_node_s;
        if segment.to_node == arch.rrc_terminator {
            return 2.0 * one_way;
        }
    }
    unreachable!("RRC terminator {} not on the CP path", arch.rrc_terminator);
}

/// Outcome of the attachment timing check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttachmentOutcome {
    pub rtt_s: f64,
    pub crt_limit_s: f64,
    /// True when contention resolution completes inside the window.
    pub success: bool,
}

/// Checks the RRC round trip fits inside the contention-resolution
/// window (inclusive bound).
pub fn crt_check(arch: &ArchModel, crt_limit_s: f64, processing_per_node_s: f64) -> AttachmentOutcome {
    let rtt_s = path_rtt(arch, processing_per_node_s);
    AttachmentOutcome { rtt_s, crt_limit_s, success: rtt_s <= crt_limit_s }
}

// ====================================================================
// Comparison table
// ====================================================================

/// Column header of the comparison CSV.
pub const COMPARISON_CSV_HEADER: &str = "arch,radio_hops,wire_hops,tunnel_depth,up_overhead_bytes,cp_overhead_bytes,cp_rtt_ms,onboard_upf,roaming_free,backhaul_agnostic,e2e_qos";

/// One architecture's figures, side by side with the others.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub arch: ArchKind,
    pub radio_hops: usize,
    pub wire_hops: usize,
    pub tunnel_depth: u32,
    /// User-plane overhead on the radio backhaul hop, bytes.
    pub up_overhead_bytes: u32,
    /// Control-plane overhead on the radio backhaul hop, bytes.
    pub cp_overhead_bytes: u32,
    /// Round trip to the RRC terminator, milliseconds.
    pub cp_rtt_ms: f64,
    pub capabilities: Capabilities,
}

impl ComparisonRow {
    pub fn csv_line(&self) -> String {
        let c = self.capabilities;
        format!(
            "{},{},{},{},{},{},{:.3},{},{},{},{}",
            self.arch,
            self.radio_hops,
            self.wire_hops,
            self.tunnel_depth,
            self.up_overhead_bytes,
            self.cp_overhead_bytes,
            self.cp_rtt_ms,
            c.onboard_upf,
            c.roaming_free,
            c.backhaul_agnostic,
            c.e2e_qos
        )
    }
}

/// Builds comparison rows for the given models, in input order.
pub fn compare_table(archs: &[ArchModel], processing_per_node_s: f64) -> Vec<ComparisonRow> {
    archs
        .iter()
        .map(|arch| {
            let backhaul = arch.radio_backhaul_index();
            ComparisonRow {
                arch: arch.kind,
                radio_hops: arch.up_path.iter().filter(|s| s.medium == Medium::Radio).count(),
                wire_hops: arch.up_path.iter().filter(|s| s.medium == Medium::Wire).count(),
                tunnel_depth: arch.tunnel_depth_backhaul,
                up_overhead_bytes: overhead_bytes(arch, Plane::Up, backhaul)
                    .expect("backhaul index is in range"),
                cp_overhead_bytes: overhead_bytes(arch, Plane::Cp, backhaul)
                    .expect("backhaul index is in range"),
                cp_rtt_ms: path_rtt(arch, processing_per_node_s) * 1e3,
                capabilities: arch.kind.capabilities(),
            }
        })
        .collect()
}
