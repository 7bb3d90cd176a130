import { z } from "zod";

/** Error envelope every non-2xx service response carries. */
export const ErrorEnvelope = z.object({
  code: z.string(),
  message: z.string(),
  detail: z.unknown(),
});
export type ErrorEnvelope = z.infer<typeof ErrorEnvelope>;

export const PackState = z.enum(["draft", "under_review", "accepted", "rejected"]);
export type PackState = z.infer<typeof PackState>;

export const ProvenanceEntry = z.object({
  doc_id: z.string(),
  version_label: z.string(),
  checksum: z.string(),
  node_ids: z.array(z.string()),
});
export type ProvenanceEntry = z.infer<typeof ProvenanceEntry>;

export const EpistemicLimits = z.object({
  divergences: z.array(z.string()),
  gaps: z.array(z.string()),
  dependencies: z.array(z.string()),
  silences: z.array(z.string()),
});
export type EpistemicLimits = z.infer<typeof EpistemicLimits>;

export const Pack = z.object({
  pack_id: z.string(),
  focus: z.string(),
  derived_from: z.string().nullable(),
  question: z.object({ text: z.string(), assertion_type: z.string() }),
  response: z.object({
    assertion: z.string(),
    validity_conditions: z.array(z.string()),
    invalidity_conditions: z.array(z.string()),
  }),
  provenance: z.array(ProvenanceEntry),
  limits: EpistemicLimits,
  status: z.object({
    state: PackState,
    curator: z.string().nullable(),
    justification: z.string().nullable(),
    decided_at: z.string().nullable(),
  }),
});
export type Pack = z.infer<typeof Pack>;

export const Decision = z.object({
  decision_id: z.string(),
  pack_id: z.string(),
  verdict: z.string(),
  curator: z.string(),
  justification: z.string(),
  timestamp: z.string(),
});
export type Decision = z.infer<typeof Decision>;

export const GraphNode = z.object({
  node_id: z.string(),
  kind: z.string(),
  label: z.string(),
  props: z.record(z.unknown()),
});
export type GraphNode = z.infer<typeof GraphNode>;

export const GraphEdge = z.object({
  src: z.string(),
  rel: z.string(),
  dst: z.string(),
});
export type GraphEdge = z.infer<typeof GraphEdge>;

export const ContextGraph = z.object({
  graph_id: z.string(),
  view: z.string(),
  root_entity_id: z.string(),
  nodes: z.array(GraphNode),
  edges: z.array(GraphEdge),
  generated_at: z.string(),
  content_digest: z.string(),
});
export type ContextGraph = z.infer<typeof ContextGraph>;

export const TraceEntry = z.object({
  doc_id: z.string(),
  version_label: z.string(),
  checksum: z.string(),
  node_ids: z.array(z.string()),
  source: z.string(),
  result: z.enum(["verified", "corrupted", "missing"]),
});
export type TraceEntry = z.infer<typeof TraceEntry>;

export const TraceChain = z.object({
  graph_id: z.string(),
  assertion_node_id: z.string(),
  pack_id: z.string(),
  assertion: z.string(),
  assertion_type: z.string(),
  question: z.string(),
  curator: z.string().nullable(),
  justification: z.string().nullable(),
  decided_at: z.string().nullable(),
  derived_from: z.string().nullable(),
  entries: z.array(TraceEntry),
  complete: z.boolean(),
});
export type TraceChain = z.infer<typeof TraceChain>;

export const ValidationReport = z.object({
  violations: z.array(z.number()),
  unverifiable: z.array(z.number()),
  well_formed: z.boolean(),
});
export type ValidationReport = z.infer<typeof ValidationReport>;
