export { ApiError, PlpClient, describeError } from "./api.js";
export type { ClientOptions } from "./api.js";
export {
  ContextGraph,
  Decision,
  EpistemicLimits,
  ErrorEnvelope,
  GraphEdge,
  GraphNode,
  Pack,
  PackState,
  ProvenanceEntry,
  TraceChain,
  TraceEntry,
  ValidationReport,
} from "./schemas.js";
export { loadQueue, reviewFlow, toQueueItem } from "./queue.js";
export type { QueueClient, ReviewFlowResult, ReviewQueueItem, VerdictOutcome } from "./queue.js";
export { AXES, IncompatibleAxisError, assemblePanel, browseViews, openTrace } from "./views.js";
export type { Axis, PanelAssertion, PanelAttribute, ViewClient, ViewPanel } from "./views.js";
export {
  escapeHtml,
  renderPackDetail,
  renderPanel,
  renderQueue,
  renderTrace,
} from "./render.js";
