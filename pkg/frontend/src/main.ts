import { App } from './app.js';

const root = document.getElementById('view')!;
const signBarElement = document.getElementById('sign-bar')!;
const tokenInput = document.getElementById('token') as HTMLInputElement;

const app = new App(root, signBarElement);
tokenInput.addEventListener('change', () => app.setToken(tokenInput.value.trim()));
void app.start();
