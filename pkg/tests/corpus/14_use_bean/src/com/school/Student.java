package com.school;

public class Student implements java.io.Serializable {

	private String name;
	private int ID;
	...

	public Student (){
	}

	public String getName() {
		return this.name;
	}

	public int getId() {
	return this.id;
	}

	public void setName(String name) {
	this.name = name;
	}

	public void setId(int id) {
		this.id = id;
	}
	...
}
