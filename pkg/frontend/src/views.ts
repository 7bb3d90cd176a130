import type { ContextGraph, TraceChain } from "./schemas.js";
import { ApiError, describeError } from "./api.js";

/** The four contextual axes and the view each one opens. */
export const AXES = {
  Regulatory: "CTX_MPP_REGULATORY",
  Prescribe: "CTX_VMP_COMPLETE",
  Dispense: "CTX_DISPENSATION",
  Administer: "CTX_SUBSTANCE_PROFILE",
} as const;
export type Axis = keyof typeof AXES;

export interface PanelAttribute {
  nodeId: string;
  key: string;
  value: string;
  extras: Record<string, string>;
}

export interface PanelAssertion {
  nodeId: string;
  packId: string;
  assertionType: string;
  question: string;
  illocutionaryClass: string;
}

/** Everything the panel shows comes straight off the graph payload. */
export interface ViewPanel {
  axis: Axis;
  view: string;
  rootEntityId: string;
  graphId: string;
  generatedAt: string;
  contentDigest: string;
  attributes: PanelAttribute[];
  assertions: PanelAssertion[];
}

export class IncompatibleAxisError extends Error {
  constructor(readonly userMessage: string) {
    super(userMessage);
    this.name = "IncompatibleAxisError";
  }
}

export interface ViewClient {
  entityView(entityId: string, view: string): Promise<ContextGraph>;
  trace(graphId: string, nodeId: string): Promise<TraceChain>;
}

function asString(value: unknown): string {
  return typeof value === "string" ? value : JSON.stringify(value);
}

export function assemblePanel(axis: Axis, graph: ContextGraph): ViewPanel {
  const attributes: PanelAttribute[] = [];
  const assertions: PanelAssertion[] = [];
  for (const node of graph.nodes) {
    if (node.kind === "attribute") {
      const { key, value, ...rest } = node.props as Record<string, unknown>;
      const extras: Record<string, string> = {};
      for (const [k, v] of Object.entries(rest)) extras[k] = asString(v);
      attributes.push({
        nodeId: node.node_id,
        key: asString(key),
        value: asString(value),
        extras,
      });
    } else if (node.kind === "assertion") {
      const props = node.props as Record<string, unknown>;
      assertions.push({
        nodeId: node.node_id,
        packId: asString(props.pack_id),
        assertionType: asString(props.assertion_type),
        question: asString(props.question),
        illocutionaryClass: asString(props.illocutionary_class),
      });
    }
  }
  return {
    axis,
    view: graph.view,
    rootEntityId: graph.root_entity_id,
    graphId: graph.graph_id,
    generatedAt: graph.generated_at,
    contentDigest: graph.content_digest,
    attributes,
    assertions,
  };
}

/** Open one axis on one entity; incompatible pairs become a readable message. */
export async function browseViews(
  client: ViewClient,
  entityId: string,
  axis: Axis,
): Promise<ViewPanel> {
  try {
    const graph = await client.entityView(entityId, AXES[axis]);
    return assemblePanel(axis, graph);
  } catch (error) {
    if (error instanceof ApiError && error.code === "level_view_mismatch") {
      throw new IncompatibleAxisError(describeError(error));
    }
    throw error;
  }
}

/** Drill down from an assertion to its full provenance chain. */
export async function openTrace(
  client: ViewClient,
  graphId: string,
  assertionNodeId: string,
): Promise<TraceChain> {
  return client.trace(graphId, assertionNodeId);
}
