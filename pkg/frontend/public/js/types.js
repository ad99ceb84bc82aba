// Shapes of the search service's JSON payloads. The UI never recomputes any
// of these numbers; it renders them as received.
export const CHANNEL_ORDER = ["L", "a", "b", "d", "t_in", "t_co"];
