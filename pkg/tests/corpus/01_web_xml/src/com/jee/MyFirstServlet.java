package com.jee;

public class MyFirstServlet extends HttpServlet
{
	...
}
