/** Wire and client-side types shared across the chat UI. */
export {};
