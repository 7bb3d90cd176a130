import type { Decision, Pack, PackState } from "./schemas.js";
import { ApiError } from "./api.js";

/** Projection of a pack for the review table. */
export interface ReviewQueueItem {
  packId: string;
  questionText: string;
  assertionType: string;
  focus: string;
  state: PackState;
  provenancePreview: string[];
  limitsPreview: string[];
}

/** The slice of the client the queue needs; narrow for testability. */
export interface QueueClient {
  listPacks(state?: PackState): Promise<Pack[]>;
  curatePack(
    packId: string,
    verdict: "accept" | "reject",
    justification: string,
  ): Promise<{ pack: Pack; decision: Decision }>;
}

export function toQueueItem(pack: Pack): ReviewQueueItem {
  const limitsPreview: string[] = [];
  for (const [kind, entries] of Object.entries(pack.limits)) {
    for (const entry of entries) limitsPreview.push(`${kind}: ${entry}`);
  }
  return {
    packId: pack.pack_id,
    questionText: pack.question.text,
    assertionType: pack.question.assertion_type,
    focus: pack.focus,
    state: pack.status.state,
    provenancePreview: pack.provenance.map(
      (entry) => `${entry.doc_id}@${entry.version_label} §${entry.node_ids.join(", §")}`,
    ),
    limitsPreview,
  };
}

/** Only packs awaiting review ever enter the queue. */
export async function loadQueue(client: QueueClient): Promise<ReviewQueueItem[]> {
  const packs = await client.listPacks("under_review");
  return packs
    .filter((pack) => pack.status.state === "under_review")
    .map(toQueueItem);
}

export type VerdictOutcome =
  | { kind: "blocked"; reason: "missing_justification" }
  | { kind: "recorded"; pack: Pack; decision: Decision }
  | { kind: "error"; code: string; message: string };

export interface ReviewFlowResult {
  outcome: VerdictOutcome;
  /** Refreshed after every attempt that reached the service. */
  queue: ReviewQueueItem[] | null;
}

/**
 * Record a verdict on a queue item.
 *
 * An empty justification never leaves the client unless `force` is set,
 * in which case the service's own enforcement answers. Service error
 * codes pass through verbatim.
 */
export async function reviewFlow(
  client: QueueClient,
  packId: string,
  verdict: "accept" | "reject",
  justification: string,
  options: { force?: boolean } = {},
): Promise<ReviewFlowResult> {
  if (justification.trim().length === 0 && !options.force) {
    return { outcome: { kind: "blocked", reason: "missing_justification" }, queue: null };
  }
  try {
    const { pack, decision } = await client.curatePack(packId, verdict, justification);
    return {
      outcome: { kind: "recorded", pack, decision },
      queue: await loadQueue(client),
    };
  } catch (error) {
    if (error instanceof ApiError) {
      return {
        outcome: { kind: "error", code: error.code, message: error.message },
        queue: await loadQueue(client),
      };
    }
    throw error;
  }
}
