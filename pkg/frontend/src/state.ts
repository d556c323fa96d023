/** Client-side mirror of the session state machine.
 *
 * The server is the source of truth; this module only decides which controls
 * may be offered for a given state, so the UI can never issue a transition
 * the state machine forbids.
 */

import type { SessionState } from "./types.js";

/** Legal transitions, mirrored from the service. */
export const LEGAL_TRANSITIONS: Record<SessionState, SessionState[]> = {
  suggested: ["drafted", "approved", "declined"],
  drafted: ["approved", "declined"],
  approved: ["submitted", "declined"],
  submitted: [],
  declined: [],
};

export interface Controls {
  canEdit: boolean;
  canSave: boolean;
  canRegenerate: boolean;
  canApprove: boolean;
  canDecline: boolean;
}

export function controlsFor(state: SessionState, dirty: boolean): Controls {
  const targets = LEGAL_TRANSITIONS[state];
  // editing and saving ride on the PUT-answer guard (pre-approval states only)
  const editable = state === "suggested" || state === "drafted";
  return {
    canEdit: editable,
    canSave: editable && dirty,
    canRegenerate: editable,
    canApprove: targets.includes("approved") || state === "approved",
    canDecline: targets.includes("declined"),
  };
}

export function describeState(state: SessionState): string {
  switch (state) {
    case "suggested":
      return "Suggested - no draft available, write the answer yourself";
    case "drafted":
      return "Drafted - review and edit the generated snippet";
    case "approved":
      return "Approved - submission in progress";
    case "submitted":
      return "Submitted - answer is in the outbox";
    case "declined":
      return "Declined";
  }
}
