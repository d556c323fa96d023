/** DOM rendering for the review view.
 *
 * Pure render-from-view-model: every controller render replaces the panel
 * contents, so the page always reflects the server-confirmed state.
 */

import type { ReviewController, ViewModel } from "./controller.js";
import { describeState } from "./state.js";
import { QUALITY_CRITERIA } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function scoreBar(label: string, value: number): HTMLElement {
  const row = el("div", "score-row");
  row.appendChild(el("span", "score-label", label));
  const track = el("div", "score-track");
  const fill = el("div", "score-fill");
  fill.style.width = `${Math.round(value * 100)}%`;
  track.appendChild(fill);
  row.appendChild(track);
  row.appendChild(el("span", "score-value", value.toFixed(3)));
  return row;
}

export function render(root: HTMLElement, view: ViewModel, controller: ReviewController): void {
  root.replaceChildren();

  if (view.banner) {
    root.appendChild(el("div", "banner", view.banner));
  }

  if (view.phase === "loading") {
    root.appendChild(el("p", "empty", "Loading..."));
    return;
  }

  if (view.phase === "empty") {
    root.appendChild(el("p", "empty", view.emptyMessage || "No suggestion right now"));
    return;
  }

  if (view.phase === "confirmed" && view.confirmation) {
    const panel = el("div", "confirmation");
    panel.appendChild(el("h2", "", "Answer queued"));
    panel.appendChild(
      el(
        "p",
        "",
        `Outbox record for question ${view.confirmation.question_id} ` +
          `(${view.confirmation.mode}) at ${view.confirmation.submitted_at}`,
      ),
    );
    const body = el("pre", "outbox-body");
    body.textContent = view.confirmation.answer_body;
    panel.appendChild(body);
    root.appendChild(panel);
    return;
  }

  const session = view.session;
  if (!session) return;

  const header = el("div", "session-header");
  header.appendChild(el("h2", "", session.title));
  header.appendChild(el("span", `state state-${session.state}`, describeState(session.state)));
  root.appendChild(header);

  const scores = el("div", "scores");
  scores.appendChild(scoreBar("combined", session.similarity));
  for (const [name, value] of Object.entries(session.component_scores)) {
    scores.appendChild(scoreBar(name, value));
  }
  root.appendChild(scores);

  if (view.post) {
    const post = el("div", "post");
    post.appendChild(el("div", "tags", view.post.tags.map((t) => `[${t}]`).join(" ")));
    const body = el("div", "post-body");
    body.innerHTML = view.post.body;
    post.appendChild(body);
    for (const block of view.post.code_blocks) {
      const pre = el("pre", "code-block");
      pre.textContent = block;
      post.appendChild(pre);
    }
    post.appendChild(el("p", "meta", `${view.post.answers.length} existing answer(s), ` +
      `${view.post.view_count} views, score ${view.post.score}`));
    root.appendChild(post);
  }

  if (session.note) {
    root.appendChild(el("p", "note", session.note));
  }

  const editor = el("textarea", "editor") as HTMLTextAreaElement;
  editor.value = view.editorText;
  editor.disabled = !view.controls.canEdit;
  editor.rows = 14;
  editor.addEventListener("input", () => controller.edit(editor.value));
  root.appendChild(editor);
  root.appendChild(
    el("p", "persisted", view.dirty ? "Unsaved changes" : "All changes saved"),
  );

  const checklist = el("div", "checklist");
  checklist.appendChild(el("span", "", "Needs improvement in:"));
  for (const criterion of QUALITY_CRITERIA) {
    const label = el("label", "criterion");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = view.checklist[criterion];
    box.addEventListener("change", () => controller.tick(criterion, box.checked));
    label.appendChild(box);
    label.appendChild(document.createTextNode(criterion));
    checklist.appendChild(label);
  }
  root.appendChild(checklist);

  const actions = el("div", "actions");
  const buttons: Array<[string, keyof ViewModel["controls"], () => void]> = [
    ["Save edit", "canSave", () => void controller.save()],
    ["Regenerate draft", "canRegenerate", () => void controller.regenerate()],
    ["Approve & submit", "canApprove", () => void controller.approve()],
    ["Decline", "canDecline", () => void controller.decline()],
  ];
  for (const [label, control, handler] of buttons) {
    const button = el("button", control, label);
    button.disabled = !view.controls[control];
    button.addEventListener("click", handler);
    actions.appendChild(button);
  }
  root.appendChild(actions);
}
