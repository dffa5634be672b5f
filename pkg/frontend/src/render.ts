import type { AnswerEnvelope, AnswerView, TaggedTokenView } from "./types.js";

/**
 * Pure envelope -> HTML renderers. Answers render in envelope order — the
 * service owns the ranking, the console never re-sorts — and every number
 * shown comes straight from an envelope field.
 */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatValue(value: string | number): string {
  if (typeof value === "number") {
    return Number.isInteger(value) ? String(value) : String(value);
  }
  return value;
}

function attributeColumns(answers: AnswerView[]): string[] {
  const columns: string[] = [];
  for (const answer of answers) {
    for (const key of Object.keys(answer.values)) {
      if (!columns.includes(key)) {
        columns.push(key);
      }
    }
  }
  return columns;
}

function badge(answer: AnswerView): string {
  const cls = answer.kind === "exact" ? "badge badge-exact" : "badge badge-partial";
  return `<span class="${cls}">${answer.kind}</span>`;
}

export function renderBanner(envelope: AnswerEnvelope): string {
  if (!envelope.message) {
    return "";
  }
  return `<div class="banner" role="alert">${escapeHtml(envelope.message)}</div>`;
}

export function renderAnswersTable(envelope: AnswerEnvelope): string {
  const banner = renderBanner(envelope);
  if (envelope.answers.length === 0) {
    return banner || `<p class="empty">No answers.</p>`;
  }
  const columns = attributeColumns(envelope.answers);
  const head = ["#", "Match", ...columns, "Rank_Sim", "Similarity Measure Used"]
    .map((c) => `<th>${escapeHtml(c)}</th>`)
    .join("");
  const rows = envelope.answers
    .map((answer, i) => {
      const cells = columns
        .map((col) => {
          const value = answer.values[col];
          return `<td>${value === undefined ? "" : escapeHtml(formatValue(value))}</td>`;
        })
        .join("");
      const measure = answer.kind === "exact" ? "exact match" : answer.similarity_measure;
      return (
        `<tr data-record-id="${escapeHtml(answer.record_id)}" data-kind="${answer.kind}">` +
        `<td>${i + 1}</td><td>${badge(answer)}</td>${cells}` +
        `<td class="score">${answer.score}</td>` +
        `<td>${escapeHtml(measure)}</td></tr>`
      );
    })
    .join("");
  return (
    banner +
    `<p class="interpretation">Interpreted as: <code>${escapeHtml(envelope.interpretation)}</code></p>` +
    `<table class="answers"><thead><tr>${head}</tr></thead><tbody>${rows}</tbody></table>`
  );
}

function tokenChip(token: TaggedTokenView): string {
  const labelClass = token.label.toLowerCase().replace(/[^a-z0-9]+/g, "-");
  const negated = token.negated ? " chip-negated" : "";
  return (
    `<span class="chip chip-${labelClass}${negated}">` +
    `${escapeHtml(token.display)}<small>/${escapeHtml(token.label)}</small></span>`
  );
}

export function renderExplanation(envelope: AnswerEnvelope): string {
  const parts: string[] = [];
  if (envelope.corrected !== envelope.question) {
    parts.push(
      `<p class="correction"><s>${escapeHtml(envelope.question)}</s> ` +
        `<strong>${escapeHtml(envelope.corrected)}</strong></p>`,
    );
  } else {
    parts.push(`<p class="correction">${escapeHtml(envelope.question)}</p>`);
  }
  parts.push(`<div class="chips">${envelope.tags.map(tokenChip).join(" ")}</div>`);
  if (envelope.interpretation) {
    parts.push(
      `<p class="interpretation">Boolean form: <code>${escapeHtml(envelope.interpretation)}</code></p>`,
    );
  }
  if (envelope.sql) {
    parts.push(`<pre class="sql">${escapeHtml(envelope.sql)}</pre>`);
  }
  if (envelope.unrecognized.length > 0) {
    parts.push(
      `<p class="unrecognized">Unrecognized: ${envelope.unrecognized
        .map(escapeHtml)
        .join(", ")}</p>`,
    );
  }
  return `<div class="explanation">${parts.join("")}</div>`;
}

export function renderError(message: string): string {
  return `<div class="banner banner-error" role="alert">${escapeHtml(message)}</div>`;
}
