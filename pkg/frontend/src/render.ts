/** Pure string renderers; no framework, no DOM dependency, fully testable. */

import type { Decision, Pack, TraceChain } from "./schemas.js";
import type { ReviewQueueItem } from "./queue.js";
import type { ViewPanel } from "./views.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderQueue(items: ReviewQueueItem[]): string {
  if (items.length === 0) {
    return '<p class="queue-empty">No packs are waiting for review.</p>';
  }
  const rows = items.map((item) => {
    const provenance = item.provenancePreview.map(escapeHtml).join("<br>");
    const limits =
      item.limitsPreview.length > 0
        ? item.limitsPreview.map(escapeHtml).join("<br>")
        : "<em>none declared</em>";
    return [
      `<tr data-pack="${escapeHtml(item.packId)}">`,
      `<td>${escapeHtml(item.packId)}</td>`,
      `<td><span class="badge type">${escapeHtml(item.assertionType)}</span></td>`,
      `<td>${escapeHtml(item.questionText)}</td>`,
      `<td>${escapeHtml(item.focus)}</td>`,
      `<td>${provenance}</td>`,
      `<td>${limits}</td>`,
      `<td><button data-verdict="accept">Accept</button>` +
        `<button data-verdict="reject">Reject</button></td>`,
      "</tr>",
    ].join("");
  });
  return [
    '<table class="review-queue">',
    "<thead><tr><th>Pack</th><th>Type</th><th>Question</th><th>Focus</th>",
    "<th>Provenance</th><th>Declared limits</th><th>Verdict</th></tr></thead>",
    `<tbody>${rows.join("")}</tbody>`,
    "</table>",
  ].join("");
}

function renderLimitList(title: string, entries: string[]): string {
  if (entries.length === 0) return "";
  const items = entries.map((entry) => `<li>${escapeHtml(entry)}</li>`).join("");
  return `<h4>${escapeHtml(title)}</h4><ul>${items}</ul>`;
}

/**
 * Declared limits of an accepted pack with silences or divergences are
 * rendered open and cannot collapse: a reader must scroll past them.
 */
export function renderPackDetail(pack: Pack, decisions: Decision[]): string {
  const state = pack.status.state;
  const parts: string[] = [
    `<article class="pack-detail" data-pack="${escapeHtml(pack.pack_id)}">`,
    `<header><h2>${escapeHtml(pack.pack_id)}</h2>` +
      `<span class="badge state-${escapeHtml(state)}">${escapeHtml(state)}</span></header>`,
    `<p class="question"><strong>${escapeHtml(pack.question.assertion_type)}</strong> — ` +
      `${escapeHtml(pack.question.text)}</p>`,
    `<p class="assertion">${escapeHtml(pack.response.assertion)}</p>`,
  ];

  const mustStayOpen =
    state === "accepted" &&
    (pack.limits.silences.length > 0 || pack.limits.divergences.length > 0);
  const limitsBody =
    renderLimitList("Divergences", pack.limits.divergences) +
    renderLimitList("Gaps", pack.limits.gaps) +
    renderLimitList("Dependencies", pack.limits.dependencies) +
    renderLimitList("Silences", pack.limits.silences);
  if (mustStayOpen) {
    parts.push(
      `<section class="limits always-open" aria-expanded="true">` +
        `<h3>Declared epistemic limits</h3>${limitsBody}</section>`,
    );
  } else if (limitsBody.length > 0) {
    parts.push(
      `<details class="limits" open><summary>Declared epistemic limits</summary>` +
        `${limitsBody}</details>`,
    );
  } else {
    parts.push('<p class="limits-none">No epistemic limits declared.</p>');
  }

  for (const decision of decisions) {
    parts.push(
      `<p class="decision">${escapeHtml(decision.verdict)} by ` +
        `${escapeHtml(decision.curator)} at ${escapeHtml(decision.timestamp)}: ` +
        `${escapeHtml(decision.justification)}</p>`,
    );
  }

  if (state === "rejected") {
    parts.push(
      `<button class="derive-new" data-derived-from="${escapeHtml(pack.pack_id)}">` +
        "Derive new pack</button>",
    );
  }
  parts.push("</article>");
  return parts.join("");
}

export function renderPanel(panel: ViewPanel): string {
  const attributes = panel.attributes
    .map(
      (attr) =>
        `<dt>${escapeHtml(attr.key)}</dt><dd data-node="${escapeHtml(attr.nodeId)}">` +
        `${escapeHtml(attr.value)}</dd>`,
    )
    .join("");
  const assertions = panel.assertions
    .map(
      (assertion) =>
        `<li data-trace="${escapeHtml(panel.graphId)}#${escapeHtml(assertion.nodeId)}">` +
        `<span class="badge type">${escapeHtml(assertion.assertionType)}</span> ` +
        `${escapeHtml(assertion.question)} ` +
        `<button class="open-trace">Trace</button></li>`,
    )
    .join("");
  return [
    `<section class="view-panel" data-axis="${escapeHtml(panel.axis)}" ` +
      `data-entity="${escapeHtml(panel.rootEntityId)}">`,
    `<h2>${escapeHtml(panel.axis)} view of ${escapeHtml(panel.rootEntityId)}</h2>`,
    `<dl class="attributes">${attributes}</dl>`,
    `<ol class="assertions">${assertions}</ol>`,
    `<footer>digest ${escapeHtml(panel.contentDigest.slice(0, 12))}</footer>`,
    "</section>",
  ].join("");
}

export function renderTrace(chain: TraceChain): string {
  const steps = chain.entries
    .map(
      (entry) =>
        `<li class="trace-step result-${entry.result}">` +
        `${escapeHtml(entry.doc_id)}@${escapeHtml(entry.version_label)} ` +
        `(${escapeHtml(entry.source)}) §${entry.node_ids.map(escapeHtml).join(", §")} ` +
        `<span class="badge ${entry.result}">${entry.result}</span></li>`,
    )
    .join("");
  const verdictLine =
    chain.curator !== null && chain.decided_at !== null
      ? `<p class="decision">accepted by ${escapeHtml(chain.curator)} at ` +
        `${escapeHtml(chain.decided_at)}</p>`
      : "";
  return [
    `<aside class="trace-chain" data-pack="${escapeHtml(chain.pack_id)}">`,
    `<h3>${escapeHtml(chain.pack_id)} (${escapeHtml(chain.assertion_type)})</h3>`,
    `<p>${escapeHtml(chain.question)}</p>`,
    verdictLine,
    `<ol>${steps}</ol>`,
    `<p class="completeness">${chain.complete ? "chain verified end to end" : "chain INCOMPLETE"}</p>`,
    "</aside>",
  ].join("");
}
